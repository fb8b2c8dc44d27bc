#pragma once

// Dependence relations for commands: an n-by-n matrix over the
// dependence semiring together with the syntactic read/write sets,
// built by induction on the command structure. Sequencing is matrix
// product (multipath composition), a conditional joins the corrected
// branch with the identity of the skipped path, and a loop takes the
// fixpoint of the body's partial sums before the condition correction.

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lqi/ast.hpp"
#include "lqi/semiring.hpp"

namespace lqi {

class VarEnv {
 public:
  VarEnv() = default;
  explicit VarEnv(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
    if (index_.size() != names_.size())
      throw std::invalid_argument("VarEnv: duplicate variable name");
  }

  /// Environment over a command's variables in first-occurrence order.
  static VarEnv of_command(const CommandPtr& c) { return VarEnv(vars_in_order(c)); }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }

  std::size_t index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
      throw std::invalid_argument("VarEnv: unknown variable '" + name + "'");
    return it->second;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  bool operator==(const VarEnv& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// A command's dependence matrix plus its read (in) and written (out)
/// variable sets. A matrix column without Dep and without Prop is a
/// reinitialization: the output no longer depends on any input.
struct Relation {
  VarEnv env;
  DepMatrix matrix;
  VarSet in_set;
  VarSet out_set;
};

/// Fixpoint bookkeeping from a loop-body star: the index where the
/// partial sums stabilized and the min(|in|,|out|) bound it must obey.
struct StarAudit {
  std::size_t fixpoint_index = 0;
  std::size_t bound = 0;
};

inline void check_env(const Relation& r, const VarSet& vars, const char* op) {
  for (const auto& v : vars)
    if (!r.env.contains(v))
      throw std::invalid_argument(std::string(op) + ": variable '" + v + "' not in environment");
}

inline Relation dfg_skip(const VarEnv& env) {
  return {env, mat_identity(env.size()), {}, {}};
}

inline Relation dfg_use(const std::vector<std::string>& args, const VarEnv& env) {
  Relation r{env, mat_identity(env.size()), VarSet(args.begin(), args.end()), {}};
  check_env(r, r.in_set, "dfg_use");
  return r;
}

/// Assignment: each right-hand-side variable feeds a dependence into
/// the target column; every other variable propagates on the diagonal.
/// The target's previous value is destroyed, so its column carries no
/// propagation (a copy included), and a constant right-hand side leaves
/// the column empty: a reinitialization. The no-op copy x = x keeps the
/// plain propagation instead of a dependence.
inline Relation dfg_assign(const std::string& target, const ExprPtr& value, const VarEnv& env) {
  VarSet reads = vars_of_expr(value);
  Relation r{env, DepMatrix(env.size()), reads, {target}};
  check_env(r, reads, "dfg_assign");
  check_env(r, r.out_set, "dfg_assign");

  if (auto* v = std::get_if<Expr::Var>(&value->node); v && v->name == target) {
    r.matrix = mat_identity(env.size());
    return r;
  }

  std::size_t tcol = env.index(target);
  for (std::size_t i = 0; i < env.size(); ++i)
    if (i != tcol) r.matrix.set(i, i, DepValue::Prop);
  for (const auto& v : reads) r.matrix.set(env.index(v), tcol, DepValue::Dep);
  return r;
}

/// Left-to-right composition; the read/write sets are the plain unions
/// of the parts' sets, deliberately conservative so that independence
/// tests stay sound in the presence of `use`.
inline Relation dfg_seq(const std::vector<Relation>& parts) {
  if (parts.empty()) throw std::invalid_argument("dfg_seq: empty part list");
  Relation acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const Relation& p = parts[i];
    if (!(p.env == acc.env)) throw std::invalid_argument("dfg_seq: environment mismatch");
    acc.matrix = mat_mul(acc.matrix, p.matrix);
    acc.in_set.insert(p.in_set.begin(), p.in_set.end());
    acc.out_set.insert(p.out_set.begin(), p.out_set.end());
  }
  return acc;
}

/// Joins the correction term: every written variable additionally
/// depends on every condition variable (entrywise outer product of the
/// condition-variable rows with the out-set columns).
inline Relation condition_correction(const Relation& r, const VarSet& cond_vars) {
  check_env(r, cond_vars, "condition_correction");
  Relation out = r;
  for (const auto& cv : cond_vars) {
    std::size_t row = r.env.index(cv);
    for (const auto& ov : r.out_set) out.matrix.join(row, r.env.index(ov), DepValue::Dep);
  }
  out.in_set.insert(cond_vars.begin(), cond_vars.end());
  return out;
}

/// Conditional without else: the corrected branch joined with the
/// identity for the skipped path. With an else branch exactly one side
/// runs, so the result joins the two corrected branches and no identity
/// is added.
inline Relation dfg_if(const Relation& then_r, const std::optional<Relation>& else_r,
                       const VarSet& cond_vars) {
  Relation then_c = condition_correction(then_r, cond_vars);
  if (!else_r) {
    Relation out = then_c;
    out.matrix = mat_add(out.matrix, mat_identity(out.env.size()));
    return out;
  }
  if (!(else_r->env == then_r.env)) throw std::invalid_argument("dfg_if: environment mismatch");
  Relation else_c = condition_correction(*else_r, cond_vars);
  Relation out = then_c;
  out.matrix = mat_add(then_c.matrix, else_c.matrix);
  out.in_set.insert(else_c.in_set.begin(), else_c.in_set.end());
  out.out_set.insert(else_c.out_set.begin(), else_c.out_set.end());
  return out;
}

/// Loop: star of the body (join of all matrix powers, stable after
/// finitely many partial sums) followed by the condition correction.
/// The audit records where the sums stabilized together with the
/// min(|in|,|out|) bound they must respect.
inline Relation dfg_while(const Relation& body_r, const VarSet& cond_vars,
                          StarAudit* audit = nullptr) {
  StarResult star = mat_star(body_r.matrix);
  if (audit) {
    audit->fixpoint_index = star.fixpoint_index;
    audit->bound = std::min(body_r.in_set.size(), body_r.out_set.size());
  }
  Relation starred{body_r.env, std::move(star.matrix), body_r.in_set, body_r.out_set};
  return condition_correction(starred, cond_vars);
}

/// Builds the relation of a command over a caller-supplied environment,
/// appending one audit entry per loop encountered.
inline Relation dfg_command(const CommandPtr& c, const VarEnv& env,
                            std::vector<StarAudit>* audits = nullptr) {
  if (!c) throw std::invalid_argument("dfg_command: null command");
  if (auto* a = std::get_if<Command::Assign>(&c->node)) return dfg_assign(a->target, a->value, env);
  if (std::get_if<Command::Skip>(&c->node)) return dfg_skip(env);
  if (auto* u = std::get_if<Command::Use>(&c->node)) return dfg_use(u->args, env);
  if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    if (s->items.empty()) return dfg_skip(env);
    std::vector<Relation> parts;
    parts.reserve(s->items.size());
    for (const auto& item : s->items) parts.push_back(dfg_command(item, env, audits));
    return dfg_seq(parts);
  }
  if (auto* w = std::get_if<Command::While>(&c->node)) {
    Relation body = dfg_command(w->body, env, audits);
    StarAudit audit;
    Relation out = dfg_while(body, vars_of_expr(w->cond), &audit);
    if (audits) audits->push_back(audit);
    return out;
  }
  const auto& i = std::get<Command::If>(c->node);
  Relation then_r = dfg_command(i.then_branch, env, audits);
  std::optional<Relation> else_r;
  if (i.else_branch) else_r = dfg_command(i.else_branch, env, audits);
  return dfg_if(then_r, else_r, vars_of_expr(i.cond));
}

/// Relation over the command's own variables in first-occurrence order.
inline Relation dfg_of_command(const CommandPtr& c, std::vector<StarAudit>* audits = nullptr) {
  return dfg_command(c, VarEnv::of_command(c), audits);
}

/// Deterministic DOT rendering of a relation as a bipartite graph:
/// inputs on the left, outputs on the right, solid arrows for
/// dependence, dashed for propagation, no arrow for a reinitialized
/// output.
inline std::string to_dot(const Relation& r, const std::string& name = "dfg") {
  std::string out = "digraph " + name + " {\n";
  out += "  rankdir=LR;\n";
  out += "  node [shape=plaintext];\n";
  out += "  subgraph cluster_in {\n    label=\"in\";\n    style=invis;\n";
  for (std::size_t i = 0; i < r.env.size(); ++i)
    out += "    in_" + r.env.name(i) + " [label=\"" + r.env.name(i) + "\"];\n";
  out += "  }\n";
  out += "  subgraph cluster_out {\n    label=\"out\";\n    style=invis;\n";
  for (std::size_t i = 0; i < r.env.size(); ++i)
    out += "    out_" + r.env.name(i) + " [label=\"" + r.env.name(i) + "\"];\n";
  out += "  }\n";
  for (std::size_t i = 0; i < r.env.size(); ++i)
    for (std::size_t j = 0; j < r.env.size(); ++j) {
      DepValue v = r.matrix.at(i, j);
      if (v == DepValue::Bot) continue;
      out += "  in_" + r.env.name(i) + " -> out_" + r.env.name(j);
      if (v == DepValue::Prop) out += " [style=dashed]";
      out += ";\n";
    }
  out += "}\n";
  return out;
}

}  // namespace lqi
