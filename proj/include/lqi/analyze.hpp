#pragma once

// Per-loop quasi-invariance analysis. A loop body is split into chunks
// (one per top-level statement; a nested if or while is a single
// chunk). A dependence graph over chunks is built from reaching
// definitions, every chunk receives an invariance degree — the number
// of iterations after which re-executing it has no further effect — and
// the raw degrees are then closed into effective (peel-safe) degrees.
//
// Raw degree recurrence: a chunk containing an observation is never
// movable (it must observe once per iteration, so it gets the infinite
// degree), as is any chunk on a dependence cycle. Otherwise the degree
// is the maximum
// over incoming dependencies: a same-iteration definition contributes
// the writer's degree, a value carried from the previous iteration
// contributes the writer's degree plus one, and a value from before the
// loop contributes one.
//
// Effective degrees repair the raw per-chunk rule for whole-body
// consistency, to a fixpoint:
//   1. reader consistency — when a chunk reads a variable whose nearest
//      preceding writer is not the variable's last writer in the body,
//      the reader sees a mid-iteration value, so every writer of that
//      variable must stay at least as long as the reader;
//   2. mixed writers — if any writer of a variable stays forever, all
//      its writers do, otherwise dropped writers would stop overwriting
//      the surviving one;
//   3. write groups — chunks whose written sets overlap (transitively)
//      stabilize together, so each group takes its maximum degree.
// The loop condition acts as a reader of its variables at the iteration
// boundary; it always sees each variable's last writer, so rule 1 never
// fires for it, but it is modelled for uniformity.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lqi/ast.hpp"
#include "lqi/dfg.hpp"
#include "lqi/print.hpp"

namespace lqi {

/// Invariance degree: a positive iteration count, or infinite for
/// chunks that must stay in the loop. Infinite absorbs in max and +1.
struct Degree {
  int v = kInfiniteMark;

  static constexpr int kInfiniteMark = -1;

  static Degree finite(int d) { return Degree{d}; }
  static Degree infinite() { return Degree{kInfiniteMark}; }

  bool is_infinite() const { return v == kInfiniteMark; }
  bool is_finite() const { return !is_infinite(); }

  Degree plus_one() const { return is_infinite() ? *this : Degree{v + 1}; }

  static Degree max(Degree a, Degree b) {
    if (a.is_infinite() || b.is_infinite()) return infinite();
    return Degree{std::max(a.v, b.v)};
  }

  bool operator==(const Degree& o) const = default;

  /// Serialized form: -1 stands for an infinite degree.
  int to_int() const { return v; }

  std::string str() const { return is_infinite() ? "∞" : std::to_string(v); }
};

enum class EdgeKind { SameIteration, LoopCarried, MaybeBoth };

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::SameIteration: return "same_iteration";
    case EdgeKind::LoopCarried: return "loop_carried";
    case EdgeKind::MaybeBoth: return "maybe_both";
  }
  return "?";
}

/// Writer index for a value that reaches from before the loop.
constexpr int kLoopEntry = -1;

struct DepEdge {
  int reader;
  int writer;  // kLoopEntry when the value comes from before the loop
  std::string var;
  EdgeKind kind;
};

struct DepGraph {
  std::vector<DepEdge> edges;
};

struct Chunk {
  int index = 0;
  CommandPtr cmd;
  Relation rel;
  bool is_use = false;   // the statement itself is a use
  bool has_use = false;  // contains an observation anywhere; never movable
  bool is_assign = false;  // unconditional single assignment (a strong kill)
  std::string assign_target;
  std::string text;
};

struct LoopAnalysis {
  int loop_id = 0;
  int line = 0;
  int col = 0;
  CommandPtr loop;  // the analyzed while command
  VarEnv env;
  VarSet cond_vars;
  std::vector<Chunk> chunks;
  DepGraph dep_graph;
  std::vector<Degree> raw_degree;
  std::vector<Degree> effective_degree;
  int peel_count = 0;
  std::vector<StarAudit> audits;  // front() is the loop's own body star
  Relation loop_rel;
};

// ---------------------------------------------------------------------------
// Chunking.

/// One chunk per top-level statement of a loop body, each with its
/// relation over the shared loop environment. Nested loops are starred
/// in place, so an inner while is one chunk carrying its composed
/// relation; its stars are appended to `audits`.
inline std::vector<Chunk> chunk_loop(const CommandPtr& body, const VarEnv& env,
                                     std::vector<StarAudit>* audits = nullptr) {
  std::vector<CommandPtr> items;
  if (auto* s = std::get_if<Command::Seq>(&body->node))
    items = s->items;
  else
    items.push_back(body);

  std::vector<Chunk> chunks;
  chunks.reserve(items.size());
  for (const auto& item : items) {
    Chunk c;
    c.index = static_cast<int>(chunks.size());
    c.cmd = item;
    c.rel = dfg_command(item, env, audits);
    c.is_use = std::get_if<Command::Use>(&item->node) != nullptr;
    c.has_use = contains_use(item);
    if (auto* a = std::get_if<Command::Assign>(&item->node)) {
      c.is_assign = true;
      c.assign_target = a->target;
    }
    c.text = summary(item);
    chunks.push_back(std::move(c));
  }
  return chunks;
}

// ---------------------------------------------------------------------------
// Reaching definitions.

namespace detail {

inline bool chunk_writes(const Chunk& c, const std::string& v) { return c.rel.out_set.count(v); }

/// Unconditional assignment to v: kills earlier definitions. If and
/// while chunks only may-write, so scanning continues past them.
inline bool chunk_kills(const Chunk& c, const std::string& v) {
  return c.is_assign && c.assign_target == v;
}

}  // namespace detail

/// Writers of `v` whose value can reach the read in chunk `reader`.
/// Scans backwards in source order for same-iteration definitions; if
/// the scan reaches the body start without a kill, the value from
/// before the loop reaches the first iteration, and the scan wraps to
/// pick up definitions carried from the previous iteration. A writer
/// reachable both ways is reported once with kind maybe_both. The entry
/// pseudo-writer is reported carried when the variable has in-loop
/// writers (later iterations read the carried value), same-iteration
/// when it stays untouched.
inline std::vector<std::pair<int, EdgeKind>> reaching_writers(const std::vector<Chunk>& chunks,
                                                              int reader, const std::string& v) {
  std::map<int, int> kinds;  // writer -> bit 1 same-iteration, bit 2 carried
  bool killed = false;
  for (int q = reader - 1; q >= 0; --q) {
    const Chunk& c = chunks[static_cast<std::size_t>(q)];
    if (!detail::chunk_writes(c, v)) continue;
    kinds[q] |= 1;
    if (detail::chunk_kills(c, v)) {
      killed = true;
      break;
    }
  }
  bool entry_reaches = !killed;
  if (!killed) {
    for (int q = static_cast<int>(chunks.size()) - 1; q >= 0; --q) {
      const Chunk& c = chunks[static_cast<std::size_t>(q)];
      if (!detail::chunk_writes(c, v)) continue;
      kinds[q] |= 2;
      if (detail::chunk_kills(c, v)) break;
    }
  }

  bool any_writer = false;
  for (const auto& c : chunks)
    if (detail::chunk_writes(c, v)) {
      any_writer = true;
      break;
    }

  std::vector<std::pair<int, EdgeKind>> out;
  for (const auto& [writer, mask] : kinds)
    out.emplace_back(writer, mask == 3   ? EdgeKind::MaybeBoth
                             : mask == 1 ? EdgeKind::SameIteration
                                         : EdgeKind::LoopCarried);
  if (entry_reaches)
    out.emplace_back(kLoopEntry,
                     any_writer ? EdgeKind::LoopCarried : EdgeKind::SameIteration);
  return out;
}

/// Dependence edges for every read variable of every chunk.
inline DepGraph build_dep_graph(const std::vector<Chunk>& chunks) {
  DepGraph g;
  for (const Chunk& c : chunks)
    for (const auto& v : c.rel.in_set)
      for (const auto& [writer, kind] : reaching_writers(chunks, c.index, v))
        g.edges.push_back({c.index, writer, v, kind});
  return g;
}

// ---------------------------------------------------------------------------
// Independence predicates.

inline bool is_independent(const Relation& c1, const Relation& c2) {
  for (const auto& v : c1.out_set)
    if (c2.in_set.count(v)) return false;
  return true;
}

inline bool mutually_independent(const Relation& c1, const Relation& c2) {
  return is_independent(c1, c2) && is_independent(c2, c1);
}

inline bool self_independent(const Relation& c) { return is_independent(c, c); }

// ---------------------------------------------------------------------------
// Raw degrees.

namespace detail {

/// Tarjan strongly connected components over reader->writer edges;
/// marks every member of a multi-node component, plus self-loops.
inline std::vector<bool> cyclic_chunks(std::size_t n, const DepGraph& g) {
  std::vector<std::vector<int>> succ(n);
  std::vector<bool> self_loop(n, false);
  for (const auto& e : g.edges) {
    if (e.writer == kLoopEntry) continue;
    if (e.writer == e.reader) self_loop[static_cast<std::size_t>(e.reader)] = true;
    succ[static_cast<std::size_t>(e.reader)].push_back(e.writer);
  }

  std::vector<int> index(n, -1), lowlink(n, 0);
  std::vector<bool> on_stack(n, false), cyclic(n, false);
  std::vector<int> stack;
  int next_index = 0;

  struct Frame {
    int node;
    std::size_t child;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{static_cast<int>(root), 0}};
    index[root] = lowlink[root] = next_index++;
    stack.push_back(static_cast<int>(root));
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto u = static_cast<std::size_t>(f.node);
      if (f.child < succ[u].size()) {
        int w = succ[u][f.child++];
        auto wi = static_cast<std::size_t>(w);
        if (index[wi] == -1) {
          index[wi] = lowlink[wi] = next_index++;
          stack.push_back(w);
          on_stack[wi] = true;
          call.push_back({w, 0});
        } else if (on_stack[wi]) {
          lowlink[u] = std::min(lowlink[u], index[wi]);
        }
      } else {
        if (lowlink[u] == index[u]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = false;
            comp.push_back(w);
            if (w == f.node) break;
          }
          if (comp.size() > 1)
            for (int w : comp) cyclic[static_cast<std::size_t>(w)] = true;
        }
        call.pop_back();
        if (!call.empty()) {
          auto p = static_cast<std::size_t>(call.back().node);
          lowlink[p] = std::min(lowlink[p], lowlink[u]);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (self_loop[i]) cyclic[i] = true;
  return cyclic;
}

}  // namespace detail

/// Raw invariance degrees from the dependence graph.
inline std::vector<Degree> raw_degrees(const std::vector<Chunk>& chunks, const DepGraph& g) {
  const std::size_t n = chunks.size();
  std::vector<std::vector<const DepEdge*>> edges(n);
  for (const auto& e : g.edges) edges[static_cast<std::size_t>(e.reader)].push_back(&e);

  std::vector<bool> cyclic = detail::cyclic_chunks(n, g);
  std::vector<std::optional<Degree>> memo(n);
  for (std::size_t i = 0; i < n; ++i)
    if (chunks[i].has_use || cyclic[i]) memo[i] = Degree::infinite();

  // Non-infinite chunks form a DAG, so plain recursion terminates.
  auto compute = [&](auto&& self, std::size_t s) -> Degree {
    if (memo[s]) return *memo[s];
    Degree best = Degree::finite(1);
    bool any = false;
    for (const DepEdge* e : edges[s]) {
      Degree contribution;
      if (e->writer == kLoopEntry) {
        contribution = Degree::finite(1);
      } else {
        Degree writer_deg = self(self, static_cast<std::size_t>(e->writer));
        contribution =
            e->kind == EdgeKind::SameIteration ? writer_deg : writer_deg.plus_one();
      }
      best = any ? Degree::max(best, contribution) : contribution;
      any = true;
    }
    memo[s] = any ? best : Degree::finite(1);
    return *memo[s];
  };
  std::vector<Degree> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = compute(compute, i);
  return out;
}

// ---------------------------------------------------------------------------
// Effective degrees.

/// Applies the reader-consistency, mixed-writer, and write-group
/// closures to a fixpoint. Degrees only grow, so this terminates.
inline std::vector<Degree> effective_degrees(const std::vector<Chunk>& chunks,
                                             const VarSet& cond_vars,
                                             const std::vector<Degree>& raw) {
  const std::size_t n = chunks.size();
  std::vector<Degree> deg = raw;

  std::map<std::string, std::vector<int>> writers;  // var -> ascending positions
  for (const Chunk& c : chunks)
    for (const auto& v : c.rel.out_set) writers[v].push_back(c.index);

  auto raise = [&](int w, Degree d) {
    Degree next = Degree::max(deg[static_cast<std::size_t>(w)], d);
    if (!(next == deg[static_cast<std::size_t>(w)])) {
      deg[static_cast<std::size_t>(w)] = next;
      return true;
    }
    return false;
  };

  // Reader at position p of variable v: the writer whose value the read
  // observes mid-iteration vs. the value carried across the boundary.
  auto reader_rule = [&](int pos, const VarSet& reads, Degree reader_deg) {
    bool changed = false;
    for (const auto& v : reads) {
      auto it = writers.find(v);
      if (it == writers.end()) continue;
      const auto& w = it->second;
      int last_in_body = w.back();
      int last_before = last_in_body;  // no earlier writer: reads the carried value
      for (auto rit = w.rbegin(); rit != w.rend(); ++rit)
        if (*rit < pos) {
          last_before = *rit;
          break;
        }
      if (last_before == last_in_body) continue;
      for (int writer : w) changed |= raise(writer, reader_deg);
    }
    return changed;
  };

  bool changed = true;
  while (changed) {
    changed = false;

    // Mixed writers: an always-running writer keeps overwriting, so the
    // other writers of the same variable cannot be dropped either.
    for (const auto& [v, w] : writers) {
      bool any_inf = false, any_fin = false;
      for (int i : w) (deg[static_cast<std::size_t>(i)].is_infinite() ? any_inf : any_fin) = true;
      if (any_inf && any_fin)
        for (int i : w) changed |= raise(i, Degree::infinite());
    }

    // Reader consistency for every chunk, plus the loop condition as a
    // boundary reader of its variables (it sees last writers only, so
    // it never fires; kept to match the dependence model).
    for (const Chunk& c : chunks)
      changed |= reader_rule(c.index, c.rel.in_set, deg[static_cast<std::size_t>(c.index)]);
    changed |= reader_rule(static_cast<int>(n), cond_vars, Degree::infinite());

    // Write groups: union-find over finite chunks sharing any output.
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (const auto& [v, w] : writers) {
      int prev = -1;
      for (int i : w) {
        if (deg[static_cast<std::size_t>(i)].is_infinite()) continue;
        if (prev != -1) parent[static_cast<std::size_t>(find(i))] = find(prev);
        prev = i;
      }
    }
    std::map<int, Degree> group_max;
    for (std::size_t i = 0; i < n; ++i) {
      if (deg[i].is_infinite()) continue;
      int root = find(static_cast<int>(i));
      auto it = group_max.find(root);
      group_max[root] = it == group_max.end() ? deg[i] : Degree::max(it->second, deg[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (deg[i].is_infinite()) continue;
      changed |= raise(static_cast<int>(i), group_max[find(static_cast<int>(i))]);
    }
  }
  return deg;
}

// ---------------------------------------------------------------------------
// Baseline invariant detection.

/// Classic fixpoint invariant detection: a chunk is invariant when each
/// variable it reads either reaches only from outside the loop, or has
/// exactly one reaching in-loop definition which is itself already
/// invariant. Use chunks are excluded.
inline std::set<int> basic_invariants(const std::vector<Chunk>& chunks) {
  std::set<int> invariant;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Chunk& c : chunks) {
      if (c.has_use || invariant.count(c.index)) continue;
      bool ok = true;
      for (const auto& v : c.rel.in_set) {
        auto reach = reaching_writers(chunks, c.index, v);
        std::set<int> defs;
        bool entry = false;
        for (const auto& [w, kind] : reach) {
          if (w == kLoopEntry)
            entry = true;
          else
            defs.insert(w);
        }
        if (defs.empty()) continue;  // only values from outside the loop
        if (defs.size() == 1 && !entry && invariant.count(*defs.begin())) continue;
        ok = false;
        break;
      }
      if (ok) {
        invariant.insert(c.index);
        changed = true;
      }
    }
  }
  return invariant;
}

// ---------------------------------------------------------------------------
// Whole-loop and whole-program analysis.

inline LoopAnalysis analyze_loop(const CommandPtr& loop, int loop_id = 0) {
  const auto* w = std::get_if<Command::While>(&loop->node);
  if (!w) throw std::invalid_argument("analyze_loop: not a while command");

  LoopAnalysis a;
  a.loop_id = loop_id;
  a.line = loop->line;
  a.col = loop->col;
  a.loop = loop;
  a.env = VarEnv::of_command(loop);
  a.cond_vars = vars_of_expr(w->cond);

  std::vector<StarAudit> nested;
  a.chunks = chunk_loop(w->body, a.env, &nested);

  std::vector<Relation> parts;
  parts.reserve(a.chunks.size());
  for (const auto& c : a.chunks) parts.push_back(c.rel);
  Relation body_rel = parts.empty() ? dfg_skip(a.env) : dfg_seq(parts);

  StarAudit own;
  a.loop_rel = dfg_while(body_rel, a.cond_vars, &own);
  a.audits.push_back(own);
  a.audits.insert(a.audits.end(), nested.begin(), nested.end());

  a.dep_graph = build_dep_graph(a.chunks);
  a.raw_degree = raw_degrees(a.chunks, a.dep_graph);
  a.effective_degree = effective_degrees(a.chunks, a.cond_vars, a.raw_degree);

  a.peel_count = 0;
  for (const auto& d : a.effective_degree)
    if (d.is_finite()) a.peel_count = std::max(a.peel_count, d.v);
  return a;
}

namespace detail {

inline void collect_loops(const CommandPtr& c, std::vector<CommandPtr>& loops) {
  if (!c) return;
  if (auto* s = std::get_if<Command::Seq>(&c->node)) {
    for (const auto& item : s->items) collect_loops(item, loops);
  } else if (auto* w = std::get_if<Command::While>(&c->node)) {
    loops.push_back(c);
    collect_loops(w->body, loops);
  } else if (auto* i = std::get_if<Command::If>(&c->node)) {
    collect_loops(i->then_branch, loops);
    collect_loops(i->else_branch, loops);
  }
}

}  // namespace detail

/// Analyses every loop, innermost first; results are listed in source
/// (pre-order) order. An inner loop appears both as its own entry and,
/// starred, as a single chunk of the enclosing loop.
inline std::vector<LoopAnalysis> analyze_program(const CommandPtr& prog) {
  std::vector<CommandPtr> loops;
  detail::collect_loops(prog, loops);
  std::vector<LoopAnalysis> out;
  out.reserve(loops.size());
  for (std::size_t i = loops.size(); i-- > 0;)
    out.push_back(analyze_loop(loops[i], static_cast<int>(i)));
  std::sort(out.begin(), out.end(),
            [](const LoopAnalysis& x, const LoopAnalysis& y) { return x.loop_id < y.loop_id; });
  return out;
}

}  // namespace lqi
