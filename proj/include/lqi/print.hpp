#pragma once

// Pretty-printer producing canonical re-parseable source. Parentheses
// are emitted only where precedence requires them, so parse(pretty(c))
// is structurally equal to c for any parser- or generator-built tree.

#include <string>

#include "lqi/ast.hpp"

namespace lqi {

namespace detail {

inline int precedence(BinOp op) {
  switch (op) {
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod:
      return 5;
    case BinOp::Add:
    case BinOp::Sub:
      return 4;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
      return 3;
    case BinOp::Eq:
    case BinOp::Ne:
      return 2;
  }
  return 0;
}

inline const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
  }
  return "?";
}

inline int expr_prec(const ExprPtr& e) {
  if (std::get_if<Expr::Binary>(&e->node))
    return precedence(std::get<Expr::Binary>(e->node).op);
  if (std::get_if<Expr::Unary>(&e->node)) return 6;
  return 7;  // literal, variable
}

inline void print_expr(const ExprPtr& e, std::string& out) {
  if (auto* lit = std::get_if<Expr::IntLit>(&e->node)) {
    out += std::to_string(lit->value);
  } else if (auto* v = std::get_if<Expr::Var>(&e->node)) {
    out += v->name;
  } else if (auto* u = std::get_if<Expr::Unary>(&e->node)) {
    out += '-';
    bool parens = expr_prec(u->operand) < 7;
    if (parens) out += '(';
    print_expr(u->operand, out);
    if (parens) out += ')';
  } else {
    const auto& b = std::get<Expr::Binary>(e->node);
    int prec = precedence(b.op);
    bool lparens = expr_prec(b.lhs) < prec;
    bool rparens = expr_prec(b.rhs) <= prec;  // operators are left-associative
    if (lparens) out += '(';
    print_expr(b.lhs, out);
    if (lparens) out += ')';
    out += ' ';
    out += op_text(b.op);
    out += ' ';
    if (rparens) out += '(';
    print_expr(b.rhs, out);
    if (rparens) out += ')';
  }
}

inline void print_command(const CommandPtr& c, std::string& out, int indent) {
  auto pad = [&] { out.append(static_cast<std::size_t>(indent) * 2, ' '); };
  if (auto* a = std::get_if<Command::Assign>(&c->node)) {
    pad();
    out += a->target;
    out += " = ";
    print_expr(a->value, out);
    out += ";\n";
  } else if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items) print_command(item, out, indent);
  } else if (std::get_if<Command::Skip>(&c->node)) {
    pad();
    out += "skip;\n";
  } else if (auto* u = std::get_if<Command::Use>(&c->node)) {
    pad();
    out += "use(";
    for (std::size_t i = 0; i < u->args.size(); ++i) {
      if (i) out += ", ";
      out += u->args[i];
    }
    out += ");\n";
  } else if (auto* w = std::get_if<Command::While>(&c->node)) {
    pad();
    out += "while (";
    print_expr(w->cond, out);
    out += ") {\n";
    print_command(w->body, out, indent + 1);
    pad();
    out += "}\n";
  } else {
    const auto& i = std::get<Command::If>(c->node);
    pad();
    out += "if (";
    print_expr(i.cond, out);
    out += ") {\n";
    print_command(i.then_branch, out, indent + 1);
    pad();
    if (i.else_branch) {
      out += "} else {\n";
      print_command(i.else_branch, out, indent + 1);
      pad();
    }
    out += "}\n";
  }
}

}  // namespace detail

inline std::string pretty(const ExprPtr& e) {
  std::string out;
  detail::print_expr(e, out);
  return out;
}

inline std::string pretty(const CommandPtr& c) {
  std::string out;
  detail::print_command(c, out, 0);
  return out;
}

/// One-line rendering used in reports and degree tables.
inline std::string summary(const CommandPtr& c) {
  std::string text = pretty(c);
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    if (ch == '\n' || ch == ' ') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += ch;
  }
  return out;
}

}  // namespace lqi
