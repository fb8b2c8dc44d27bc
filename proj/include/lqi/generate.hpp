#pragma once

// Seeded random program generator for the differential-testing
// campaigns. The same config and index always produce the same tree.
// In guaranteed-termination mode every loop is a counted loop with a
// dedicated counter variable and a literal bound, so any generated
// program finishes on any store.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lqi/ast.hpp"

namespace lqi {

struct GenConfig {
  std::uint64_t seed = 1;
  int max_depth = 3;
  int max_body_len = 5;
  int var_pool_size = 5;
  double loop_probability = 0.35;
  double use_probability = 0.2;
  bool guaranteed_termination = true;
};

namespace detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform draw in [0, n); implemented by hand so the stream only
  /// depends on the engine, not on a library distribution.
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

  bool chance(double p) {
    return (static_cast<double>(next() >> 11) * 0x1.0p-53) < p;
  }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class ProgramGen {
 public:
  ProgramGen(const GenConfig& cfg, std::uint64_t index)
      : cfg_(cfg), rng_(mix_seed(cfg.seed, index)) {
    static const char* pool[] = {"a", "b", "x", "y", "z", "w", "t", "s"};
    int n = std::min<int>(cfg.var_pool_size, 8);
    for (int i = 0; i < std::max(n, 1); ++i) vars_.emplace_back(pool[i]);
  }

  CommandPtr program() {
    std::vector<CommandPtr> items = sequence(0, 1 + rng_.below(cfg_.max_body_len));
    return make_seq(std::move(items));
  }

 private:
  const std::string& pick_var() { return vars_[static_cast<std::size_t>(rng_.below(
      static_cast<int>(vars_.size())))]; }

  ExprPtr expr(int depth) {
    if (depth >= 2 || rng_.chance(0.45)) {
      if (rng_.chance(0.5)) return int_lit(rng_.below(10));
      return var_ref(pick_var());
    }
    int roll = rng_.below(100);
    BinOp op = roll < 40   ? BinOp::Add
               : roll < 60 ? BinOp::Sub
               : roll < 80 ? BinOp::Mul
               : roll < 88 ? BinOp::Div
               : roll < 92 ? BinOp::Mod
               : roll < 96 ? BinOp::Lt
                           : BinOp::Eq;
    return binary(op, expr(depth + 1), expr(depth + 1));
  }

  ExprPtr condition() {
    int roll = rng_.below(4);
    BinOp op = roll == 0 ? BinOp::Lt : roll == 1 ? BinOp::Le : roll == 2 ? BinOp::Gt : BinOp::Ne;
    ExprPtr rhs = rng_.chance(0.5) ? int_lit(rng_.below(8)) : var_ref(pick_var());
    return binary(op, var_ref(pick_var()), std::move(rhs));
  }

  /// Appends one statement; a loop contributes its counter
  /// initialization as well in termination mode.
  void statement(int depth, std::vector<CommandPtr>& out) {
    if (depth < cfg_.max_depth && rng_.chance(cfg_.loop_probability)) {
      if (cfg_.guaranteed_termination) {
        std::string counter = "i" + std::to_string(counter_index_++);
        out.push_back(make_assign(counter, int_lit(0)));
        std::vector<CommandPtr> body = sequence(depth + 1, 1 + rng_.below(cfg_.max_body_len));
        body.push_back(make_assign(counter, binary(BinOp::Add, var_ref(counter), int_lit(1))));
        out.push_back(
            make_while(binary(BinOp::Lt, var_ref(counter), int_lit(1 + rng_.below(6))),
                       make_seq(std::move(body))));
      } else {
        std::vector<CommandPtr> body = sequence(depth + 1, 1 + rng_.below(cfg_.max_body_len));
        out.push_back(make_while(condition(), make_seq(std::move(body))));
      }
      return;
    }
    if (depth < cfg_.max_depth && rng_.chance(0.15)) {
      std::vector<CommandPtr> then_items = sequence(depth + 1, 1 + rng_.below(3));
      CommandPtr else_branch;
      if (rng_.chance(0.4)) else_branch = make_seq(sequence(depth + 1, 1 + rng_.below(3)));
      out.push_back(make_if(condition(), make_seq(std::move(then_items)), std::move(else_branch)));
      return;
    }
    if (use_budget_ > 0 && rng_.chance(cfg_.use_probability)) {
      --use_budget_;
      std::vector<std::string> args{pick_var()};
      if (rng_.chance(0.3)) args.push_back(pick_var());
      out.push_back(make_use(std::move(args), next_site_++));
      return;
    }
    if (rng_.chance(0.05)) {
      out.push_back(make_skip());
      return;
    }
    out.push_back(make_assign(pick_var(), expr(0)));
  }

  std::vector<CommandPtr> sequence(int depth, int len) {
    std::vector<CommandPtr> out;
    for (int i = 0; i < len; ++i) statement(depth, out);
    return out;
  }

  GenConfig cfg_;
  Rng rng_;
  std::vector<std::string> vars_;
  int use_budget_ = 3;  // observation-rich but short traces
  int next_site_ = 0;
  int counter_index_ = 0;
};

}  // namespace detail

inline CommandPtr gen_program(const GenConfig& cfg, std::uint64_t index) {
  detail::ProgramGen gen(cfg, index);
  return gen.program();
}

}  // namespace lqi
