// lqi — analyze, peel, run, and differentially test WHILE programs.
//
// Exit codes: 0 success, 1 parse error, 2 runtime error, 3 fuel
// exhausted.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lqi/analyze.hpp"
#include "lqi/harness.hpp"
#include "lqi/interp.hpp"
#include "lqi/parse.hpp"
#include "lqi/print.hpp"
#include "lqi/report.hpp"
#include "lqi/transform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitFuel = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

lqi::CommandPtr parse_file(const std::string& path) {
  return lqi::parse(read_file(path));
}

bool parse_binding(const std::string& text, std::string& name, lqi::Int& value) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  name = text.substr(0, eq);
  try {
    value = std::stoll(text.substr(eq + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

lqi::Store store_from_bindings(const std::vector<std::string>& bindings) {
  lqi::Store store;
  for (const auto& b : bindings) {
    std::string name;
    lqi::Int value;
    if (!parse_binding(b, name, value))
      throw CLI::ValidationError("--input", "expected NAME=INT, got '" + b + "'");
    store.set(name, value);
  }
  return store;
}

int cmd_analyze(const std::string& file, bool json, const std::string& dot_dir) {
  auto prog = parse_file(file);
  auto analyses = lqi::analyze_program(prog);
  if (json) {
    std::cout << lqi::analysis_report_json(analyses).dump(2) << "\n";
  } else {
    for (const auto& a : analyses) {
      const auto& audit = a.audits.front();
      std::printf("loop %d at %d:%d  peel_count=%d  star fixpoint %zu (bound %zu)\n", a.loop_id,
                  a.line, a.col, a.peel_count, audit.fixpoint_index, audit.bound);
      std::string vars;
      for (const auto& v : a.env.names()) {
        if (!vars.empty()) vars += ", ";
        vars += v;
      }
      std::printf("  vars: %s\n", vars.c_str());
      for (const auto& c : a.chunks)
        std::printf("  [%d] raw=%s effective=%s  %s\n", c.index,
                    a.raw_degree[static_cast<std::size_t>(c.index)].str().c_str(),
                    a.effective_degree[static_cast<std::size_t>(c.index)].str().c_str(),
                    c.text.c_str());
    }
    if (analyses.empty()) std::printf("no loops\n");
  }
  if (!dot_dir.empty()) {
    for (const auto& a : analyses) {
      std::string path = dot_dir + "/loop" + std::to_string(a.loop_id) + ".dot";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write '" + path + "'");
      out << lqi::to_dot(a.loop_rel, "loop" + std::to_string(a.loop_id));
    }
  }
  return kExitOk;
}

int cmd_optimize(const std::string& file, const std::string& out_path) {
  auto prog = parse_file(file);
  for (const auto& a : lqi::analyze_program(prog))
    std::fprintf(stderr, "loop %d: peel_count %d\n", a.loop_id, a.peel_count);
  std::string text = lqi::pretty(lqi::optimize(prog));
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << text;
  }
  return kExitOk;
}

int cmd_run(const std::string& file, const std::vector<std::string>& bindings, std::uint64_t fuel,
            bool count_steps) {
  auto prog = parse_file(file);
  lqi::Outcome outcome = lqi::run(prog, store_from_bindings(bindings), fuel);
  for (const auto& obs : outcome.trace) {
    std::printf("use@%d:", obs.site);
    for (std::size_t i = 0; i < obs.values.size(); ++i)
      std::printf("%s%lld", i ? "," : " ", static_cast<long long>(obs.values[i]));
    std::printf("\n");
  }
  if (outcome.status == lqi::RunStatus::RuntimeError) {
    std::fprintf(stderr, "runtime error: %s\n", lqi::to_string(outcome.error));
    return kExitRuntime;
  }
  if (outcome.status == lqi::RunStatus::FuelExhausted) {
    std::fprintf(stderr, "fuel exhausted after %llu steps\n",
                 static_cast<unsigned long long>(outcome.steps));
    return kExitFuel;
  }
  for (const auto& [name, value] : outcome.final_store.values)
    std::printf("%s = %lld\n", name.c_str(), static_cast<long long>(value));
  if (count_steps)
    std::printf("steps = %llu\n", static_cast<unsigned long long>(outcome.steps));
  return kExitOk;
}

int cmd_bench(const std::string& file, const std::string& values_csv, const std::string& params_csv,
              const std::vector<std::string>& bindings, std::uint64_t fuel) {
  auto prog = parse_file(file);
  std::vector<lqi::Int> sizes;
  {
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ',')) sizes.push_back(std::stoll(item));
  }
  std::vector<std::string> params;
  {
    std::stringstream ss(params_csv);
    std::string item;
    while (std::getline(ss, item, ',')) params.push_back(item);
  }
  auto rows = lqi::bench_complexity(prog, sizes, params, store_from_bindings(bindings), fuel);
  std::printf("%12s %18s %18s %10s %10s\n", "n", "steps_original", "steps_optimized", "slope_orig",
              "slope_opt");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string so = "-", sp = "-";
    if (i > 0) {
      const auto& q = rows[i - 1];
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f",
                    lqi::growth_slope(q.size, q.steps_original, r.size, r.steps_original));
      so = buf;
      std::snprintf(buf, sizeof buf, "%.2f",
                    lqi::growth_slope(q.size, q.steps_optimized, r.size, r.steps_optimized));
      sp = buf;
    }
    std::printf("%12lld %18llu %18llu %10s %10s%s\n", static_cast<long long>(r.size),
                static_cast<unsigned long long>(r.steps_original),
                static_cast<unsigned long long>(r.steps_optimized), so.c_str(), sp.c_str(),
                r.status_original == lqi::RunStatus::Finished &&
                        r.status_optimized == lqi::RunStatus::Finished
                    ? (r.runs_equivalent ? "" : "  TRACE MISMATCH")
                    : "  FUEL EXHAUSTED");
  }
  return kExitOk;
}

int cmd_difftest(std::uint64_t seed, int count, int stores, std::uint64_t fuel,
                 const std::string& mode_name, bool termination) {
  lqi::GenConfig cfg;
  cfg.seed = seed;
  cfg.guaranteed_termination = termination;
  lqi::TransformMode mode = mode_name == "raw-peel" ? lqi::TransformMode::RawPeel
                            : mode_name == "identity" ? lqi::TransformMode::Identity
                                                      : lqi::TransformMode::Optimize;
  lqi::DiffReport report = lqi::difftest_campaign(cfg, count, stores, fuel, mode);
  for (const auto& entry : report.entries)
    std::cout << lqi::diff_entry_json(entry, cfg.seed).dump() << "\n";
  std::fprintf(stderr, "%d/%zu failures (mode %s)\n", report.failures, report.entries.size(),
               lqi::to_string(report.mode));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-invariance analysis and loop peeling for WHILE programs"};
  app.require_subcommand(1);

  std::string file, dot_dir, out_path, values_csv = "50,100,200", params_csv = "n";
  std::string mode_name = "optimize";
  std::vector<std::string> bindings;
  std::uint64_t fuel = 100000, seed = 1;
  int count = 100, stores = 5;
  bool json = false, count_steps = false, termination = true;

  auto* analyze = app.add_subcommand("analyze", "print per-loop invariance degrees");
  analyze->add_option("file", file)->required();
  analyze->add_flag("--json", json, "emit the JSON analysis report");
  analyze->add_option("--dot", dot_dir, "write one DOT file per loop into this directory");

  auto* optimize = app.add_subcommand("optimize", "peel quasi-invariant chunks");
  optimize->add_option("file", file)->required();
  optimize->add_option("-o,--output", out_path, "output file (default: stdout)");

  auto* runc = app.add_subcommand("run", "interpret a program");
  runc->add_option("file", file)->required();
  runc->add_option("--input", bindings, "initial store entries NAME=INT");
  runc->add_option("--fuel", fuel, "step budget");
  runc->add_flag("--count-steps", count_steps, "print the executed step count");

  auto* bench = app.add_subcommand("bench", "compare step counts before and after optimization");
  bench->add_option("file", file)->required();
  bench->add_option("--values", values_csv, "comma-separated sizes");
  bench->add_option("--params", params_csv, "store variables bound to each size");
  bench->add_option("--input", bindings, "extra store entries NAME=INT");
  bench->add_option("--fuel", fuel, "step budget per run");

  auto* difftest = app.add_subcommand("difftest", "random differential-testing campaign");
  difftest->add_option("--seed", seed);
  difftest->add_option("--count", count, "number of generated programs");
  difftest->add_option("--stores", stores, "random stores per program");
  difftest->add_option("--fuel", fuel);
  difftest->add_option("--mode", mode_name)
      ->check(CLI::IsMember({"optimize", "raw-peel", "identity"}));
  difftest->add_flag("--termination,!--no-termination", termination,
                     "generate guaranteed-terminating loops (default on)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(file, json, dot_dir);
    if (optimize->parsed()) return cmd_optimize(file, out_path);
    if (runc->parsed()) return cmd_run(file, bindings, fuel, count_steps);
    if (bench->parsed()) return cmd_bench(file, values_csv, params_csv, bindings, fuel);
    if (difftest->parsed()) return cmd_difftest(seed, count, stores, fuel, mode_name, termination);
  } catch (const lqi::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  }
  return kExitOk;
}
