#pragma once

// Semantics-preserving rewrites: loop peeling driven by effective
// invariance degrees, plus three guarded independence rewrites
// (specializing a self-independent loop body, swapping mutually
// independent commands, hoisting an independent head out of a loop).
// Every rewrite is all-or-nothing: a failed guard returns no result and
// the input is never partially transformed.

#include <optional>
#include <stdexcept>
#include <vector>

#include "lqi/analyze.hpp"
#include "lqi/ast.hpp"

namespace lqi {

/// Which statements go into each peeled copy. Copy k keeps every chunk
/// with degree >= k, so the copies shrink monotonically down to the
/// residual loop of never-movable chunks.
struct PeelPlan {
  int loop_id = 0;
  int peel_count = 0;
  std::vector<std::vector<int>> copies;  // chunk indices per copy, in source order
  std::vector<int> residual;             // infinite-degree chunks
};

namespace detail {

inline PeelPlan plan_from_degrees(const LoopAnalysis& a, const std::vector<Degree>& degree) {
  PeelPlan plan;
  plan.loop_id = a.loop_id;
  for (const auto& d : degree)
    if (d.is_finite()) plan.peel_count = std::max(plan.peel_count, d.v);
  for (int k = 1; k <= plan.peel_count; ++k) {
    std::vector<int> copy;
    for (const Chunk& c : a.chunks) {
      Degree d = degree[static_cast<std::size_t>(c.index)];
      if (d.is_infinite() || d.v >= k) copy.push_back(c.index);
    }
    plan.copies.push_back(std::move(copy));
  }
  for (const Chunk& c : a.chunks)
    if (degree[static_cast<std::size_t>(c.index)].is_infinite()) plan.residual.push_back(c.index);
  return plan;
}

}  // namespace detail

/// Plan from the effective (peel-safe) degrees.
inline PeelPlan peel_plan(const LoopAnalysis& a) {
  return detail::plan_from_degrees(a, a.effective_degree);
}

/// Plan straight from the raw per-chunk degrees, without the
/// consistency closures. Unsound for bodies where one variable has
/// several writers; kept as a planted bug so the differential harness
/// can prove it would catch one.
inline PeelPlan peel_plan_raw(const LoopAnalysis& a) {
  return detail::plan_from_degrees(a, a.raw_degree);
}

/// Nested-guard peeling:
///   if (E) { copy1; if (E) { copy2; ... while (E) { residual } ... } }
/// Each guard re-evaluates the loop condition after the previous copy,
/// exactly like the original per-iteration check; the residual loop is
/// kept even when empty so divergence is preserved. A plan with
/// peel_count 0 returns the loop unchanged.
inline CommandPtr peel(const CommandPtr& loop, const PeelPlan& plan) {
  const auto* w = std::get_if<Command::While>(&loop->node);
  if (!w) throw std::invalid_argument("peel: not a while command");
  if (plan.peel_count == 0) return loop;

  std::vector<CommandPtr> body_items;
  if (auto* s = std::get_if<Command::Seq>(&w->body->node))
    body_items = s->items;
  else
    body_items.push_back(w->body);
  for (const auto& copy : plan.copies)
    for (int i : copy)
      if (i < 0 || static_cast<std::size_t>(i) >= body_items.size())
        throw std::invalid_argument("peel: plan does not match the loop body");

  auto pick = [&](const std::vector<int>& indices) {
    std::vector<CommandPtr> items;
    items.reserve(indices.size());
    for (int i : indices) items.push_back(body_items[static_cast<std::size_t>(i)]);
    return items;
  };

  CommandPtr inner = make_while(w->cond, make_seq(pick(plan.residual)));
  for (int k = plan.peel_count; k >= 1; --k) {
    std::vector<CommandPtr> items = pick(plan.copies[static_cast<std::size_t>(k - 1)]);
    items.push_back(inner);
    inner = make_if(w->cond, make_seq(std::move(items)));
  }
  return inner;
}

// ---------------------------------------------------------------------------
// Independence rewrites.

/// while (E) { C }  ==>  if (E) { C; while (E) { skip; } }
/// when C is self-independent and E reads nothing C writes: the body's
/// inputs never change, so one execution does the work of all of them.
/// The skip loop preserves divergence when E stays true.
inline std::optional<CommandPtr> specialize_while(const CommandPtr& loop) {
  const auto* w = std::get_if<Command::While>(&loop->node);
  if (!w) return std::nullopt;
  Relation body = dfg_of_command(w->body);
  if (!self_independent(body)) return std::nullopt;
  for (const auto& v : vars_of_expr(w->cond))
    if (body.out_set.count(v)) return std::nullopt;
  std::vector<CommandPtr> items;
  if (auto* s = std::get_if<Command::Seq>(&w->body->node))
    items = s->items;
  else
    items.push_back(w->body);
  items.push_back(make_while(w->cond, make_seq({make_skip()})));
  return make_if(w->cond, make_seq(std::move(items)));
}

/// [C1; C2]  ==>  [C2; C1] when the two commands are mutually
/// independent. Observation order pins commands with use sites, and a
/// pair of commands that can both error, diverge, or observe is
/// refused: reordering could swap which abnormal outcome surfaces.
inline std::optional<CommandPtr> swap_commands(const CommandPtr& c1, const CommandPtr& c2) {
  Relation r1 = dfg_of_command(c1);
  Relation r2 = dfg_of_command(c2);
  if (!mutually_independent(r1, r2)) return std::nullopt;
  auto effectful = [](const CommandPtr& c) {
    return contains_use(c) || may_error(c) || may_diverge(c);
  };
  if (effectful(c1) && effectful(c2)) return std::nullopt;
  return make_seq({c2, c1});
}

/// while (E) { C1; rest }  ==>  if (E) { C1; while (E) { rest } }
/// when C1 is self-independent, mutually independent with the rest, and
/// writes nothing E reads (so the residual condition is unaffected).
/// C1 must not observe: it would observe once instead of per iteration.
inline std::optional<CommandPtr> hoist_head(const CommandPtr& loop) {
  const auto* w = std::get_if<Command::While>(&loop->node);
  if (!w) return std::nullopt;
  const auto* body = std::get_if<Command::Seq>(&w->body->node);
  if (!body || body->items.empty()) return std::nullopt;

  CommandPtr head = body->items.front();
  CommandPtr rest = make_seq({body->items.begin() + 1, body->items.end()});
  Relation rhead = dfg_of_command(head);
  Relation rrest = dfg_of_command(rest);
  if (!self_independent(rhead)) return std::nullopt;
  if (!mutually_independent(rhead, rrest)) return std::nullopt;
  for (const auto& v : vars_of_expr(w->cond))
    if (rhead.out_set.count(v)) return std::nullopt;
  if (contains_use(head)) return std::nullopt;
  return make_if(w->cond, make_seq({head, make_while(w->cond, rest)}));
}

// ---------------------------------------------------------------------------
// Whole-program optimization.

namespace detail {

inline CommandPtr optimize_command(const CommandPtr& c, bool use_closures) {
  if (!c) return c;
  if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    std::vector<CommandPtr> items;
    items.reserve(s->items.size());
    for (const auto& item : s->items) items.push_back(optimize_command(item, use_closures));
    return make_seq(std::move(items));
  }
  if (auto* w = std::get_if<Command::While>(&c->node)) {
    CommandPtr body = optimize_command(w->body, use_closures);
    CommandPtr loop = make_while(w->cond, body);
    LoopAnalysis a = analyze_loop(loop);
    PeelPlan plan = use_closures ? peel_plan(a) : peel_plan_raw(a);
    return peel(loop, plan);
  }
  if (auto* i = std::get_if<Command::If>(&c->node)) {
    CommandPtr then_branch = optimize_command(i->then_branch, use_closures);
    CommandPtr else_branch =
        i->else_branch ? optimize_command(i->else_branch, use_closures) : nullptr;
    return make_if(i->cond, std::move(then_branch), std::move(else_branch));
  }
  return c;
}

}  // namespace detail

/// Peels every loop with a nonzero peel count, innermost first. The
/// result is a fixed point: optimizing it again changes nothing.
inline CommandPtr optimize(const CommandPtr& prog) {
  return detail::optimize_command(prog, /*use_closures=*/true);
}

/// Same traversal but with the raw-degree plans (the planted bug).
inline CommandPtr optimize_raw(const CommandPtr& prog) {
  return detail::optimize_command(prog, /*use_closures=*/false);
}

}  // namespace lqi
