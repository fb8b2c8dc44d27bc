#pragma once

// Deterministic fuel-bounded reference interpreter. Every assignment,
// skip, use, and condition evaluation costs one step of fuel.
// Arithmetic is wrapping 64-bit; division or modulo by zero aborts the
// run with a runtime-error outcome. Unbound variables read as 0, so any
// store is a valid starting point.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lqi/ast.hpp"

namespace lqi {

struct Store {
  std::map<std::string, Int> values;  // sorted for reproducible dumps

  Int get(const std::string& name) const {
    auto it = values.find(name);
    return it == values.end() ? 0 : it->second;
  }
  void set(const std::string& name, Int v) { values[name] = v; }

  bool operator==(const Store& o) const = default;
};

enum class RunStatus { Finished, FuelExhausted, RuntimeError };

enum class RuntimeErrorKind { None, DivByZero, ModByZero };

inline const char* to_string(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::None: return "none";
    case RuntimeErrorKind::DivByZero: return "div_by_zero";
    case RuntimeErrorKind::ModByZero: return "mod_by_zero";
  }
  return "?";
}

struct Observation {
  int site;
  std::vector<Int> values;
  bool operator==(const Observation& o) const = default;
};

struct Outcome {
  RunStatus status = RunStatus::Finished;
  RuntimeErrorKind error = RuntimeErrorKind::None;
  Store final_store;                // meaningful when status == Finished
  std::vector<Observation> trace;   // one entry per executed use
  std::uint64_t steps = 0;          // statements plus condition evaluations
};

namespace detail {

inline Int wrap_add(Int a, Int b) {
  return static_cast<Int>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline Int wrap_sub(Int a, Int b) {
  return static_cast<Int>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline Int wrap_mul(Int a, Int b) {
  return static_cast<Int>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}
inline Int wrap_neg(Int a) { return static_cast<Int>(-static_cast<std::uint64_t>(a)); }

struct Machine {
  Store store;
  std::vector<Observation> trace;
  std::uint64_t fuel;
  std::uint64_t steps = 0;
  RunStatus status = RunStatus::Finished;
  RuntimeErrorKind error = RuntimeErrorKind::None;

  bool ok() const { return status == RunStatus::Finished; }

  /// Charges one unit of fuel; flips to FuelExhausted when none is left.
  bool charge() {
    if (steps >= fuel) {
      status = RunStatus::FuelExhausted;
      return false;
    }
    ++steps;
    return true;
  }

  Int eval(const ExprPtr& e) {
    if (auto* lit = std::get_if<Expr::IntLit>(&e->node)) return lit->value;
    if (auto* v = std::get_if<Expr::Var>(&e->node)) return store.get(v->name);
    if (auto* u = std::get_if<Expr::Unary>(&e->node)) {
      Int operand = eval(u->operand);
      if (!ok()) return 0;
      return wrap_neg(operand);
    }
    const auto& b = std::get<Expr::Binary>(e->node);
    Int l = eval(b.lhs);
    if (!ok()) return 0;
    Int r = eval(b.rhs);
    if (!ok()) return 0;
    switch (b.op) {
      case BinOp::Add: return wrap_add(l, r);
      case BinOp::Sub: return wrap_sub(l, r);
      case BinOp::Mul: return wrap_mul(l, r);
      case BinOp::Div:
        if (r == 0) {
          status = RunStatus::RuntimeError;
          error = RuntimeErrorKind::DivByZero;
          return 0;
        }
        if (l == INT64_MIN && r == -1) return INT64_MIN;  // wraps
        return l / r;
      case BinOp::Mod:
        if (r == 0) {
          status = RunStatus::RuntimeError;
          error = RuntimeErrorKind::ModByZero;
          return 0;
        }
        if (l == INT64_MIN && r == -1) return 0;
        return l % r;
      case BinOp::Lt: return l < r ? 1 : 0;
      case BinOp::Le: return l <= r ? 1 : 0;
      case BinOp::Gt: return l > r ? 1 : 0;
      case BinOp::Ge: return l >= r ? 1 : 0;
      case BinOp::Eq: return l == r ? 1 : 0;
      case BinOp::Ne: return l != r ? 1 : 0;
    }
    return 0;
  }

  void exec(const CommandPtr& c) {
    if (!ok()) return;
    if (auto* a = std::get_if<Command::Assign>(&c->node)) {
      if (!charge()) return;
      Int v = eval(a->value);
      if (!ok()) return;
      store.set(a->target, v);
    } else if (auto* s = std::get_if<Command::Seq>(&c->node)) {
      for (const auto& item : s->items) {
        exec(item);
        if (!ok()) return;
      }
    } else if (std::get_if<Command::Skip>(&c->node)) {
      charge();
    } else if (auto* u = std::get_if<Command::Use>(&c->node)) {
      if (!charge()) return;
      Observation obs{u->site, {}};
      obs.values.reserve(u->args.size());
      for (const auto& arg : u->args) obs.values.push_back(store.get(arg));
      trace.push_back(std::move(obs));
    } else if (auto* w = std::get_if<Command::While>(&c->node)) {
      while (true) {
        if (!charge()) return;  // condition evaluation
        Int cond = eval(w->cond);
        if (!ok()) return;
        if (cond == 0) return;
        exec(w->body);
        if (!ok()) return;
      }
    } else {
      const auto& i = std::get<Command::If>(c->node);
      if (!charge()) return;  // condition evaluation
      Int cond = eval(i.cond);
      if (!ok()) return;
      if (cond != 0)
        exec(i.then_branch);
      else if (i.else_branch)
        exec(i.else_branch);
    }
  }
};

}  // namespace detail

inline Outcome run(const CommandPtr& prog, const Store& init, std::uint64_t fuel) {
  detail::Machine m{init, {}, fuel};
  m.exec(prog);
  return Outcome{m.status, m.error, m.store, std::move(m.trace), m.steps};
}

struct Counterexample {
  Store store;
  std::string reason;
  Outcome lhs;
  Outcome rhs;
};

namespace detail {

inline bool trace_prefix(const std::vector<Observation>& a, const std::vector<Observation>& b) {
  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  for (std::size_t i = 0; i < shorter.size(); ++i)
    if (!(shorter[i] == longer[i])) return false;
  return true;
}

}  // namespace detail

/// Compares one pair of outcomes under the differential-testing rules:
/// statuses must match (error kinds included); traces must match
/// exactly, except that two fuel-exhausted runs only need to agree up
/// to the shorter trace; finished runs must also agree on the final
/// values of every variable in `vars`.
inline std::optional<std::string> outcomes_differ(const Outcome& a, const Outcome& b,
                                                  const VarSet& vars) {
  if (a.status != b.status) return "status mismatch";
  if (a.status == RunStatus::RuntimeError && a.error != b.error) return "error kind mismatch";
  if (a.status == RunStatus::FuelExhausted) {
    if (!detail::trace_prefix(a.trace, b.trace)) return "trace mismatch before fuel exhaustion";
    return std::nullopt;
  }
  if (a.trace != b.trace) return "trace mismatch";
  if (a.status == RunStatus::Finished) {
    for (const auto& v : vars)
      if (a.final_store.get(v) != b.final_store.get(v)) return "final value of '" + v + "' differs";
  }
  return std::nullopt;
}

/// Runs both programs from every store and reports the first
/// divergence, if any.
inline std::optional<Counterexample> equivalent(const CommandPtr& p1, const CommandPtr& p2,
                                                const std::vector<Store>& stores,
                                                std::uint64_t fuel) {
  VarSet vars = all_vars(p1);
  VarSet vars2 = all_vars(p2);
  vars.insert(vars2.begin(), vars2.end());
  for (const auto& store : stores) {
    Outcome a = run(p1, store, fuel);
    Outcome b = run(p2, store, fuel);
    if (auto reason = outcomes_differ(a, b, vars))
      return Counterexample{store, *reason, std::move(a), std::move(b)};
  }
  return std::nullopt;
}

}  // namespace lqi
