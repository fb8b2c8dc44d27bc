#pragma once

// Recursive-descent parser for .wh sources.
//
//   program := stmt*
//   stmt    := ID "=" expr ";"
//            | "skip" ";"
//            | "use" "(" ID {"," ID} ")" ";"
//            | "while" "(" expr ")" block
//            | "if" "(" expr ")" block ["else" block]
//   block   := "{" stmt* "}"
//
// Operators follow C precedence: * / %  over  + -  over  < <= > >=
// over  == !=, with unary minus binding tightest. Line comments start
// with //. Integer literals are 64-bit; a unary minus applied directly
// to a literal folds into a negative literal, so every printable value
// round-trips.

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lqi/ast.hpp"

namespace lqi {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

namespace detail {

enum class TokKind { Ident, Int, Punct, Keyword, Eof };

struct Token {
  TokKind kind;
  std::string text;
  std::uint64_t int_value = 0;
  int line = 1;
  int col = 1;
};

inline bool is_keyword(const std::string& s) {
  return s == "skip" || s == "use" || s == "while" || s == "if" || s == "else";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws_and_comments();
      if (pos_ >= src_.size()) {
        out.push_back({TokKind::Eof, "<eof>", 0, line_, col_});
        return out;
      }
      const int line = line_;
      const int col = col_;
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          word += advance();
        out.push_back({is_keyword(word) ? TokKind::Keyword : TokKind::Ident, word, 0, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          digits += advance();
        std::uint64_t value = 0;
        for (char d : digits) {
          // Accept up to 2^63 so that a folded unary minus can still
          // produce the most negative value.
          if (value > (UINT64_C(0x8000000000000000) - (d - '0')) / 10)
            throw ParseError("integer literal out of range", line, col);
          value = value * 10 + static_cast<std::uint64_t>(d - '0');
        }
        out.push_back({TokKind::Int, digits, value, line, col});
      } else {
        std::string punct(1, advance());
        if ((punct == "<" || punct == ">" || punct == "=" || punct == "!") && pos_ < src_.size() &&
            src_[pos_] == '=')
          punct += advance();
        if (punct == "!")
          throw ParseError("unexpected character '!'", line, col);
        static const char* singles = "=;,(){}+-*/%<>";
        if (punct.size() == 1 && std::string(singles).find(punct[0]) == std::string::npos)
          throw ParseError("unexpected character '" + punct + "'", line, col);
        out.push_back({TokKind::Punct, punct, 0, line, col});
      }
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  CommandPtr program() {
    std::vector<CommandPtr> items;
    while (peek().kind != TokKind::Eof) items.push_back(statement());
    return make_seq(std::move(items));
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw ParseError("expected " + expected + ", found '" + t.text + "'", t.line, t.col);
  }

  void expect_punct(const char* p) {
    if (peek().kind != TokKind::Punct || peek().text != p) fail(std::string("'") + p + "'");
    take();
  }

  bool at_punct(const char* p) const {
    return peek().kind == TokKind::Punct && peek().text == p;
  }

  bool at_keyword(const char* k) const {
    return peek().kind == TokKind::Keyword && peek().text == k;
  }

  std::string ident() {
    if (peek().kind != TokKind::Ident) fail("identifier");
    return take().text;
  }

  CommandPtr with_pos(CommandPtr c, int line, int col) {
    auto copy = std::make_shared<Command>(*c);
    copy->line = line;
    copy->col = col;
    return copy;
  }

  CommandPtr statement() {
    const Token& t = peek();
    if (at_keyword("skip")) {
      take();
      expect_punct(";");
      return with_pos(make_skip(), t.line, t.col);
    }
    if (at_keyword("use")) {
      take();
      expect_punct("(");
      std::vector<std::string> args;
      args.push_back(ident());
      while (at_punct(",")) {
        take();
        args.push_back(ident());
      }
      expect_punct(")");
      expect_punct(";");
      return with_pos(make_use(std::move(args), next_site_++), t.line, t.col);
    }
    if (at_keyword("while")) {
      take();
      expect_punct("(");
      ExprPtr cond = expression();
      expect_punct(")");
      return with_pos(make_while(std::move(cond), block()), t.line, t.col);
    }
    if (at_keyword("if")) {
      take();
      expect_punct("(");
      ExprPtr cond = expression();
      expect_punct(")");
      CommandPtr then_branch = block();
      CommandPtr else_branch;
      if (at_keyword("else")) {
        take();
        else_branch = block();
      }
      return with_pos(make_if(std::move(cond), std::move(then_branch), std::move(else_branch)),
                      t.line, t.col);
    }
    if (peek().kind == TokKind::Ident) {
      std::string target = ident();
      expect_punct("=");
      ExprPtr value = expression();
      expect_punct(";");
      return with_pos(make_assign(std::move(target), std::move(value)), t.line, t.col);
    }
    fail("statement");
  }

  CommandPtr block() {
    expect_punct("{");
    std::vector<CommandPtr> items;
    while (!at_punct("}")) {
      if (peek().kind == TokKind::Eof) fail("'}'");
      items.push_back(statement());
    }
    take();
    return make_seq(std::move(items));
  }

  // equality > relation > additive > multiplicative > unary > primary
  ExprPtr expression() { return equality(); }

  ExprPtr equality() {
    ExprPtr lhs = relational();
    while (at_punct("==") || at_punct("!=")) {
      BinOp op = take().text == "==" ? BinOp::Eq : BinOp::Ne;
      lhs = binary(op, std::move(lhs), relational());
    }
    return lhs;
  }

  ExprPtr relational() {
    ExprPtr lhs = additive();
    while (at_punct("<") || at_punct("<=") || at_punct(">") || at_punct(">=")) {
      std::string p = take().text;
      BinOp op = p == "<" ? BinOp::Lt : p == "<=" ? BinOp::Le : p == ">" ? BinOp::Gt : BinOp::Ge;
      lhs = binary(op, std::move(lhs), additive());
    }
    return lhs;
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (at_punct("+") || at_punct("-")) {
      BinOp op = take().text == "+" ? BinOp::Add : BinOp::Sub;
      lhs = binary(op, std::move(lhs), multiplicative());
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary_expr();
    while (at_punct("*") || at_punct("/") || at_punct("%")) {
      std::string p = take().text;
      BinOp op = p == "*" ? BinOp::Mul : p == "/" ? BinOp::Div : BinOp::Mod;
      lhs = binary(op, std::move(lhs), unary_expr());
    }
    return lhs;
  }

  ExprPtr unary_expr() {
    if (at_punct("-")) {
      take();
      if (peek().kind == TokKind::Int) {
        Token t = take();
        return int_lit(static_cast<Int>(-t.int_value));
      }
      ExprPtr operand = unary_expr();
      if (auto* lit = std::get_if<Expr::IntLit>(&operand->node))
        return int_lit(static_cast<Int>(-static_cast<std::uint64_t>(lit->value)));
      return unary(UnOp::Neg, std::move(operand));
    }
    return primary();
  }

  ExprPtr primary() {
    if (peek().kind == TokKind::Int) {
      Token t = take();
      if (t.int_value > UINT64_C(0x7fffffffffffffff))
        throw ParseError("integer literal out of range", t.line, t.col);
      return int_lit(static_cast<Int>(t.int_value));
    }
    if (peek().kind == TokKind::Ident) return var_ref(take().text);
    if (at_punct("(")) {
      take();
      ExprPtr e = expression();
      expect_punct(")");
      return e;
    }
    fail("expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int next_site_ = 0;
};

}  // namespace detail

/// Parses a whole program; the result is always a Seq. Observation
/// sites are numbered in source order starting at 0.
inline CommandPtr parse(std::string_view source) {
  detail::Lexer lexer(source);
  detail::Parser parser(lexer.run());
  return parser.program();
}

}  // namespace lqi
