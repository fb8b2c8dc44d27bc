#pragma once

// Differential-testing campaigns and step-count benchmarking. A
// campaign generates programs, transforms each one, and checks
// behavioural equivalence on a batch of random stores; failures are
// data in the report, not faults. The benchmark runs a parameterized
// program at several sizes and records interpreter step counts for the
// original and the optimized version.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqi/ast.hpp"
#include "lqi/generate.hpp"
#include "lqi/interp.hpp"
#include "lqi/print.hpp"
#include "lqi/transform.hpp"

namespace lqi {

enum class TransformMode { Optimize, RawPeel, Identity };

inline const char* to_string(TransformMode m) {
  switch (m) {
    case TransformMode::Optimize: return "optimize";
    case TransformMode::RawPeel: return "raw-peel";
    case TransformMode::Identity: return "identity";
  }
  return "?";
}

struct DiffEntry {
  std::uint64_t index = 0;
  bool ok = true;
  std::string reason;   // set on failure
  Store witness;        // set on failure
  std::string program;  // set on failure
};

struct DiffReport {
  GenConfig cfg;
  TransformMode mode = TransformMode::Optimize;
  int failures = 0;
  std::vector<DiffEntry> entries;  // in index order
};

/// Random stores drawn deterministically per program index; every
/// variable of the program gets a small value.
inline std::vector<Store> random_stores(const GenConfig& cfg, std::uint64_t index,
                                        const VarSet& vars, int count) {
  detail::Rng rng(detail::mix_seed(cfg.seed ^ 0x5b5ce1a9ULL, index));
  std::vector<Store> stores;
  stores.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Store s;
    for (const auto& v : vars) s.set(v, rng.below(17) - 8);
    stores.push_back(std::move(s));
  }
  return stores;
}

inline CommandPtr apply_transform(const CommandPtr& p, TransformMode mode) {
  switch (mode) {
    case TransformMode::Optimize: return optimize(p);
    case TransformMode::RawPeel: return optimize_raw(p);
    case TransformMode::Identity: return p;
  }
  return p;
}

inline DiffReport difftest_campaign(const GenConfig& cfg, int count, int stores_per_program,
                                    std::uint64_t fuel,
                                    TransformMode mode = TransformMode::Optimize) {
  DiffReport report;
  report.cfg = cfg;
  report.mode = mode;
  for (int i = 0; i < count; ++i) {
    CommandPtr p = gen_program(cfg, static_cast<std::uint64_t>(i));
    CommandPtr q = apply_transform(p, mode);
    std::vector<Store> stores =
        random_stores(cfg, static_cast<std::uint64_t>(i), all_vars(p), stores_per_program);
    DiffEntry entry;
    entry.index = static_cast<std::uint64_t>(i);
    if (auto cx = equivalent(p, q, stores, fuel)) {
      entry.ok = false;
      entry.reason = cx->reason;
      entry.witness = cx->store;
      entry.program = pretty(p);
      ++report.failures;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Step-count benchmarking.

struct BenchRow {
  Int size = 0;
  std::uint64_t steps_original = 0;
  std::uint64_t steps_optimized = 0;
  RunStatus status_original = RunStatus::Finished;
  RunStatus status_optimized = RunStatus::Finished;
  bool runs_equivalent = true;  // status, trace, and final store agree
};

/// Runs the program and its optimized form once per size; each listed
/// parameter is bound to the size value in the initial store.
inline std::vector<BenchRow> bench_complexity(const CommandPtr& prog, const std::vector<Int>& sizes,
                                              const std::vector<std::string>& params,
                                              const Store& base, std::uint64_t fuel) {
  CommandPtr opt = optimize(prog);
  VarSet vars = all_vars(prog);
  std::vector<BenchRow> rows;
  rows.reserve(sizes.size());
  for (Int size : sizes) {
    Store store = base;
    for (const auto& p : params) store.set(p, size);
    Outcome a = run(prog, store, fuel);
    Outcome b = run(opt, store, fuel);
    BenchRow row;
    row.size = size;
    row.steps_original = a.steps;
    row.steps_optimized = b.steps;
    row.status_original = a.status;
    row.status_optimized = b.status;
    row.runs_equivalent = !outcomes_differ(a, b, vars).has_value();
    rows.push_back(row);
  }
  return rows;
}

/// Log-log slope between two measurements: the growth exponent
/// estimate log(s2/s1) / log(n2/n1).
inline double growth_slope(Int n1, std::uint64_t s1, Int n2, std::uint64_t s2) {
  if (n1 <= 0 || n2 <= 0 || s1 == 0 || s2 == 0 || n1 == n2) return 0.0;
  return std::log(static_cast<double>(s2) / static_cast<double>(s1)) /
         std::log(static_cast<double>(n2) / static_cast<double>(n1));
}

}  // namespace lqi
