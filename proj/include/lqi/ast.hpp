#pragma once

// AST for the little imperative WHILE language: pure integer expressions
// and the commands assign / seq / skip / use / while / if. Trees are
// immutable and shared, so program transformations are cheap and a
// `use` node copied into several places keeps one observation site id.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace lqi {

using Int = std::int64_t;
using VarSet = std::set<std::string>;

enum class UnOp { Neg };
enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct IntLit {
    Int value;
  };
  struct Var {
    std::string name;
  };
  struct Unary {
    UnOp op;
    ExprPtr operand;
  };
  struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };

  std::variant<IntLit, Var, Unary, Binary> node;
};

inline ExprPtr int_lit(Int v) { return std::make_shared<Expr>(Expr{Expr::IntLit{v}}); }
inline ExprPtr var_ref(std::string name) {
  return std::make_shared<Expr>(Expr{Expr::Var{std::move(name)}});
}
inline ExprPtr unary(UnOp op, ExprPtr e) {
  return std::make_shared<Expr>(Expr{Expr::Unary{op, std::move(e)}});
}
inline ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r) {
  return std::make_shared<Expr>(Expr{Expr::Binary{op, std::move(l), std::move(r)}});
}

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct Command {
  struct Assign {
    std::string target;
    ExprPtr value;
  };
  struct Seq {
    std::vector<CommandPtr> items;
  };
  struct Skip {};
  struct Use {
    std::vector<std::string> args;  // nonempty
    int site = 0;                   // observation site id, preserved by rewrites
  };
  struct While {
    ExprPtr cond;
    CommandPtr body;  // always a Seq
  };
  struct If {
    ExprPtr cond;
    CommandPtr then_branch;          // always a Seq
    CommandPtr else_branch;          // may be null
  };

  std::variant<Assign, Seq, Skip, Use, While, If> node;
  int line = 0;  // source position of the statement, 0 when synthesized
  int col = 0;
};

inline CommandPtr make_assign(std::string target, ExprPtr value) {
  return std::make_shared<Command>(Command{Command::Assign{std::move(target), std::move(value)}});
}
inline CommandPtr make_seq(std::vector<CommandPtr> items) {
  return std::make_shared<Command>(Command{Command::Seq{std::move(items)}});
}
inline CommandPtr make_skip() { return std::make_shared<Command>(Command{Command::Skip{}}); }
inline CommandPtr make_use(std::vector<std::string> args, int site = 0) {
  return std::make_shared<Command>(Command{Command::Use{std::move(args), site}});
}
inline CommandPtr make_while(ExprPtr cond, CommandPtr body) {
  return std::make_shared<Command>(Command{Command::While{std::move(cond), std::move(body)}});
}
inline CommandPtr make_if(ExprPtr cond, CommandPtr then_branch, CommandPtr else_branch = nullptr) {
  return std::make_shared<Command>(
      Command{Command::If{std::move(cond), std::move(then_branch), std::move(else_branch)}});
}

// ---------------------------------------------------------------------------
// Structural equality (positions and observation site ids ignored).

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* ia = std::get_if<Expr::IntLit>(&a->node))
    return ia->value == std::get<Expr::IntLit>(b->node).value;
  if (auto* va = std::get_if<Expr::Var>(&a->node))
    return va->name == std::get<Expr::Var>(b->node).name;
  if (auto* ua = std::get_if<Expr::Unary>(&a->node)) {
    const auto& ub = std::get<Expr::Unary>(b->node);
    return ua->op == ub.op && expr_equal(ua->operand, ub.operand);
  }
  const auto& ba = std::get<Expr::Binary>(a->node);
  const auto& bb = std::get<Expr::Binary>(b->node);
  return ba.op == bb.op && expr_equal(ba.lhs, bb.lhs) && expr_equal(ba.rhs, bb.rhs);
}

inline bool ast_equal(const CommandPtr& a, const CommandPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* aa = std::get_if<Command::Assign>(&a->node)) {
    const auto& ab = std::get<Command::Assign>(b->node);
    return aa->target == ab.target && expr_equal(aa->value, ab.value);
  }
  if (auto* sa = std::get_if<Command::Seq>(&a->node)) {
    const auto& sb = std::get<Command::Seq>(b->node);
    if (sa->items.size() != sb.items.size()) return false;
    for (std::size_t i = 0; i < sa->items.size(); ++i)
      if (!ast_equal(sa->items[i], sb.items[i])) return false;
    return true;
  }
  if (std::get_if<Command::Skip>(&a->node)) return true;
  if (auto* ua = std::get_if<Command::Use>(&a->node))
    return ua->args == std::get<Command::Use>(b->node).args;
  if (auto* wa = std::get_if<Command::While>(&a->node)) {
    const auto& wb = std::get<Command::While>(b->node);
    return expr_equal(wa->cond, wb.cond) && ast_equal(wa->body, wb.body);
  }
  const auto& ia = std::get<Command::If>(a->node);
  const auto& ib = std::get<Command::If>(b->node);
  return expr_equal(ia.cond, ib.cond) && ast_equal(ia.then_branch, ib.then_branch) &&
         ast_equal(ia.else_branch, ib.else_branch);
}

// ---------------------------------------------------------------------------
// Variable queries.

inline void collect_expr_vars(const ExprPtr& e, VarSet& out) {
  if (!e) return;
  if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    out.insert(v->name);
  } else if (auto* u = std::get_if<Expr::Unary>(&e->node)) {
    collect_expr_vars(u->operand, out);
  } else if (auto* b = std::get_if<Expr::Binary>(&e->node)) {
    collect_expr_vars(b->lhs, out);
    collect_expr_vars(b->rhs, out);
  }
}

inline VarSet vars_of_expr(const ExprPtr& e) {
  VarSet out;
  collect_expr_vars(e, out);
  return out;
}

/// Variables read by a command: right-hand sides, every condition, and
/// `use` arguments. Purely syntactic.
inline void collect_in_vars(const CommandPtr& c, VarSet& out) {
  if (!c) return;
  if (auto* a = std::get_if<Command::Assign>(&c->node)) {
    collect_expr_vars(a->value, out);
  } else if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items) collect_in_vars(item, out);
  } else if (auto* u = std::get_if<Command::Use>(&c->node)) {
    out.insert(u->args.begin(), u->args.end());
  } else if (auto* w = std::get_if<Command::While>(&c->node)) {
    collect_expr_vars(w->cond, out);
    collect_in_vars(w->body, out);
  } else if (auto* i = std::get_if<Command::If>(&c->node)) {
    collect_expr_vars(i->cond, out);
    collect_in_vars(i->then_branch, out);
    collect_in_vars(i->else_branch, out);
  }
}

/// Variables assigned anywhere in a command (may-write for branches
/// and loops). `use` modifies nothing.
inline void collect_out_vars(const CommandPtr& c, VarSet& out) {
  if (!c) return;
  if (auto* a = std::get_if<Command::Assign>(&c->node)) {
    out.insert(a->target);
  } else if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items) collect_out_vars(item, out);
  } else if (auto* w = std::get_if<Command::While>(&c->node)) {
    collect_out_vars(w->body, out);
  } else if (auto* i = std::get_if<Command::If>(&c->node)) {
    collect_out_vars(i->then_branch, out);
    collect_out_vars(i->else_branch, out);
  }
}

inline VarSet in_vars(const CommandPtr& c) {
  VarSet out;
  collect_in_vars(c, out);
  return out;
}

inline VarSet out_vars(const CommandPtr& c) {
  VarSet out;
  collect_out_vars(c, out);
  return out;
}

inline VarSet all_vars(const CommandPtr& c) {
  VarSet out;
  collect_in_vars(c, out);
  collect_out_vars(c, out);
  return out;
}

/// First-occurrence order of variables over a command, condition before
/// body, assignment target before its right-hand side. This is the
/// variable order used for dependence matrices.
inline void collect_vars_ordered_expr(const ExprPtr& e, std::vector<std::string>& order,
                                      VarSet& seen) {
  if (!e) return;
  if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    if (seen.insert(v->name).second) order.push_back(v->name);
  } else if (auto* u = std::get_if<Expr::Unary>(&e->node)) {
    collect_vars_ordered_expr(u->operand, order, seen);
  } else if (auto* b = std::get_if<Expr::Binary>(&e->node)) {
    collect_vars_ordered_expr(b->lhs, order, seen);
    collect_vars_ordered_expr(b->rhs, order, seen);
  }
}

inline void collect_vars_ordered(const CommandPtr& c, std::vector<std::string>& order,
                                 VarSet& seen) {
  if (!c) return;
  if (auto* a = std::get_if<Command::Assign>(&c->node)) {
    if (seen.insert(a->target).second) order.push_back(a->target);
    collect_vars_ordered_expr(a->value, order, seen);
  } else if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items) collect_vars_ordered(item, order, seen);
  } else if (auto* u = std::get_if<Command::Use>(&c->node)) {
    for (const auto& arg : u->args)
      if (seen.insert(arg).second) order.push_back(arg);
  } else if (auto* w = std::get_if<Command::While>(&c->node)) {
    collect_vars_ordered_expr(w->cond, order, seen);
    collect_vars_ordered(w->body, order, seen);
  } else if (auto* i = std::get_if<Command::If>(&c->node)) {
    collect_vars_ordered_expr(i->cond, order, seen);
    collect_vars_ordered(i->then_branch, order, seen);
    collect_vars_ordered(i->else_branch, order, seen);
  }
}

inline std::vector<std::string> vars_in_order(const CommandPtr& c) {
  std::vector<std::string> order;
  VarSet seen;
  collect_vars_ordered(c, order, seen);
  return order;
}

// ---------------------------------------------------------------------------
// Syntactic effect predicates used by the rewrite guards.

inline bool contains_use(const CommandPtr& c) {
  if (!c) return false;
  if (std::get_if<Command::Use>(&c->node)) return true;
  if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items)
      if (contains_use(item)) return true;
    return false;
  }
  if (auto* w = std::get_if<Command::While>(&c->node)) return contains_use(w->body);
  if (auto* i = std::get_if<Command::If>(&c->node))
    return contains_use(i->then_branch) || contains_use(i->else_branch);
  return false;
}

inline bool expr_may_error(const ExprPtr& e) {
  if (!e) return false;
  if (auto* u = std::get_if<Expr::Unary>(&e->node)) return expr_may_error(u->operand);
  if (auto* b = std::get_if<Expr::Binary>(&e->node)) {
    if (b->op == BinOp::Div || b->op == BinOp::Mod) return true;
    return expr_may_error(b->lhs) || expr_may_error(b->rhs);
  }
  return false;
}

/// True when the command contains a division or modulo anywhere (the
/// only runtime-error sources in the language).
inline bool may_error(const CommandPtr& c) {
  if (!c) return false;
  if (auto* a = std::get_if<Command::Assign>(&c->node)) return expr_may_error(a->value);
  if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items)
      if (may_error(item)) return true;
    return false;
  }
  if (auto* w = std::get_if<Command::While>(&c->node))
    return expr_may_error(w->cond) || may_error(w->body);
  if (auto* i = std::get_if<Command::If>(&c->node))
    return expr_may_error(i->cond) || may_error(i->then_branch) || may_error(i->else_branch);
  return false;
}

/// True when the command contains a loop and therefore may diverge.
inline bool may_diverge(const CommandPtr& c) {
  if (!c) return false;
  if (std::get_if<Command::While>(&c->node)) return true;
  if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items)
      if (may_diverge(item)) return true;
    return false;
  }
  if (auto* i = std::get_if<Command::If>(&c->node))
    return may_diverge(i->then_branch) || may_diverge(i->else_branch);
  return false;
}

}  // namespace lqi
