#pragma once

// JSON serialization of analysis results and difftest campaign
// entries. Degrees serialize infinite as -1. Matrix cells are the
// one-character strings "_" (none), "0" (propagation), "1"
// (dependence). The document layout is pinned by
// schema/analysis_report.schema.json.

#include <string>

#include "json.hpp"
#include "lqi/analyze.hpp"
#include "lqi/harness.hpp"

namespace lqi {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json relation_json(const Relation& r) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& name : r.env.names()) vars.push_back(name);
  nlohmann::json matrix = nlohmann::json::array();
  for (std::size_t i = 0; i < r.env.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < r.env.size(); ++j)
      row.push_back(std::string(1, dep_char(r.matrix.at(i, j))));
    matrix.push_back(std::move(row));
  }
  return {{"vars", std::move(vars)}, {"matrix", std::move(matrix)}};
}

inline nlohmann::json loop_json(const LoopAnalysis& a) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const Chunk& c : a.chunks) {
    chunks.push_back({{"index", c.index},
                      {"source_text", c.text},
                      {"raw_degree", a.raw_degree[static_cast<std::size_t>(c.index)].to_int()},
                      {"effective_degree",
                       a.effective_degree[static_cast<std::size_t>(c.index)].to_int()}});
  }
  const StarAudit& own = a.audits.front();
  return {{"loop_id", a.loop_id},
          {"source_span", std::to_string(a.line) + ":" + std::to_string(a.col)},
          {"peel_count", a.peel_count},
          {"star_audit",
           {{"fixpoint_index", own.fixpoint_index}, {"bound", own.bound}}},
          {"chunks", std::move(chunks)},
          {"relation", relation_json(a.loop_rel)}};
}

inline nlohmann::json analysis_report_json(const std::vector<LoopAnalysis>& analyses) {
  nlohmann::json loops = nlohmann::json::array();
  for (const auto& a : analyses) loops.push_back(loop_json(a));
  return {{"schema_version", kReportSchemaVersion}, {"loops", std::move(loops)}};
}

inline nlohmann::json store_json(const Store& s) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, value] : s.values) out[name] = value;
  return out;
}

/// One JSON-lines record of a difftest campaign.
inline nlohmann::json diff_entry_json(const DiffEntry& e, std::uint64_t seed) {
  nlohmann::json out = {{"index", e.index}, {"seed", seed}, {"status", e.ok ? "ok" : "fail"}};
  if (!e.ok) {
    out["witness"] = store_json(e.witness);
    out["reason"] = e.reason;
    out["program"] = e.program;
  }
  return out;
}

}  // namespace lqi
