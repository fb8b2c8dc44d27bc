#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>

#include "doctest.h"
#include "lqi/generate.hpp"
#include "lqi/interp.hpp"
#include "lqi/parse.hpp"

using namespace lqi;

namespace {

Store store_of(std::initializer_list<std::pair<const char*, Int>> init) {
  Store s;
  for (const auto& [k, v] : init) s.set(k, v);
  return s;
}

}  // namespace

TEST_CASE("single assignment") {
  Outcome o = run(parse("x = x + 1;"), store_of({{"x", 0}}), 10);
  CHECK(o.status == RunStatus::Finished);
  CHECK(o.final_store.get("x") == 1);
  CHECK(o.steps == 1);
}

TEST_CASE("unbound variables read as zero") {
  Outcome o = run(parse("y = q + 2;"), {}, 10);
  CHECK(o.status == RunStatus::Finished);
  CHECK(o.final_store.get("y") == 2);
}

TEST_CASE("fuel exhaustion on a diverging loop") {
  Outcome o = run(parse("while (1) { skip; }"), {}, 100);
  CHECK(o.status == RunStatus::FuelExhausted);
  CHECK(o.steps == 100);
}

TEST_CASE("observer trace of the degree-two loop") {
  auto p = parse("while (i < n) { use(b); b = b + 1; b = y + y; i = i + 1; }");
  Outcome o = run(p, store_of({{"b", 5}, {"y", 3}, {"n", 4}}), 100000);
  CHECK(o.status == RunStatus::Finished);
  REQUIRE(o.trace.size() == 4);
  CHECK(o.trace[0].values == std::vector<Int>{5});
  CHECK(o.trace[1].values == std::vector<Int>{6});
  CHECK(o.trace[2].values == std::vector<Int>{6});
  CHECK(o.trace[3].values == std::vector<Int>{6});
  for (const auto& obs : o.trace) CHECK(obs.site == 0);
}

TEST_CASE("division and modulo errors") {
  Outcome div = run(parse("x = 1 / q;"), {}, 10);
  CHECK(div.status == RunStatus::RuntimeError);
  CHECK(div.error == RuntimeErrorKind::DivByZero);

  Outcome mod = run(parse("x = 1 % q;"), {}, 10);
  CHECK(mod.status == RunStatus::RuntimeError);
  CHECK(mod.error == RuntimeErrorKind::ModByZero);

  // the trace up to the error is kept
  Outcome partial = run(parse("use(q); x = 1 / q;"), {}, 10);
  CHECK(partial.status == RunStatus::RuntimeError);
  CHECK(partial.trace.size() == 1);
}

TEST_CASE("wrapping 64-bit arithmetic") {
  Outcome o = run(parse("a = 9223372036854775807 + 1; b = -9223372036854775808 - 1;"
                        " c = 3037000500 * 3037000500; d = -9223372036854775808 / -1;"
                        " e = -9223372036854775808 % -1; f = -7 / 2; g = -7 % 2;"),
                  {}, 10);
  CHECK(o.status == RunStatus::Finished);
  CHECK(o.final_store.get("a") == INT64_MIN);
  CHECK(o.final_store.get("b") == INT64_MAX);
  CHECK(o.final_store.get("c") == static_cast<Int>(UINT64_C(3037000500) * UINT64_C(3037000500)));
  CHECK(o.final_store.get("d") == INT64_MIN);
  CHECK(o.final_store.get("e") == 0);
  CHECK(o.final_store.get("f") == -3);  // C-style truncation
  CHECK(o.final_store.get("g") == -1);
}

TEST_CASE("conditions are C-like: nonzero is true") {
  Outcome o = run(parse("if (2) { a = 1; } if (0) { b = 1; } else { b = 2; }"), {}, 10);
  CHECK(o.final_store.get("a") == 1);
  CHECK(o.final_store.get("b") == 2);
}

TEST_CASE("deterministic outcomes") {
  GenConfig cfg;
  cfg.seed = 404;
  for (std::uint64_t i = 0; i < 50; ++i) {
    CommandPtr p = gen_program(cfg, i);
    Outcome a = run(p, store_of({{"a", 3}, {"b", -2}}), 5000);
    Outcome b = run(p, store_of({{"a", 3}, {"b", -2}}), 5000);
    CHECK(a.status == b.status);
    CHECK(a.steps == b.steps);
    CHECK(a.trace == b.trace);
    CHECK(a.final_store == b.final_store);
  }
}

TEST_CASE("fuel monotonicity") {
  GenConfig cfg;
  cfg.seed = 405;
  for (std::uint64_t i = 0; i < 50; ++i) {
    CommandPtr p = gen_program(cfg, i);
    Outcome full = run(p, {}, 100000);
    // termination mode rules out divergence; a run may still end in a
    // division error, which the monotonicity law does not cover
    if (full.status != RunStatus::Finished) continue;
    Outcome exact = run(p, {}, full.steps);
    Outcome more = run(p, {}, full.steps + 17);
    CHECK(exact.status == RunStatus::Finished);
    CHECK(exact.steps == full.steps);
    CHECK(exact.trace == full.trace);
    CHECK(exact.final_store == full.final_store);
    CHECK(more.steps == full.steps);
    CHECK(more.final_store == full.final_store);
    if (full.steps > 0) {
      Outcome less = run(p, {}, full.steps - 1);
      CHECK(less.status == RunStatus::FuelExhausted);
    }
  }
}

TEST_CASE("counting loop costs are linear") {
  auto p = parse("while (i < n) { i = i + 1; }");
  auto steps_at = [&](Int n) {
    Outcome o = run(p, store_of({{"n", n}}), 10'000'000);
    REQUIRE(o.status == RunStatus::Finished);
    return static_cast<double>(o.steps);
  };
  for (Int n : {100, 200, 400}) {
    double ratio = steps_at(2 * n) / steps_at(n);
    CHECK(ratio > 1.9);
    CHECK(ratio < 2.1);
  }
}

TEST_CASE("equivalence is reflexive and reports counterexamples") {
  auto p = parse("x = y * 2; use(x);");
  std::vector<Store> stores = {store_of({{"y", 1}}), store_of({{"y", -3}})};
  CHECK(!equivalent(p, p, stores, 1000).has_value());

  auto q = parse("x = y * 3; use(x);");
  auto cx = equivalent(p, q, stores, 1000);
  REQUIRE(cx.has_value());
  CHECK(cx->store.get("y") == 1);
  CHECK(cx->reason == "trace mismatch");

  // final stores matter even without observers
  auto r1 = parse("x = 1;");
  auto r2 = parse("x = 2;");
  auto cx2 = equivalent(r1, r2, {Store{}}, 1000);
  REQUIRE(cx2.has_value());
  CHECK(cx2->reason.find("final value") != std::string::npos);
}

TEST_CASE("fuel-exhausted pairs compare traces as prefixes") {
  auto p = parse("while (1) { use(a); a = a + 1; }");
  // Hand-peeled copy sharing the loop's nodes, so the observation site
  // is the same: one extra body execution before the loop.
  const auto& loop = std::get<Command::Seq>(p->node).items[0];
  const auto& body = std::get<Command::While>(loop->node).body;
  std::vector<CommandPtr> peeled = std::get<Command::Seq>(body->node).items;
  peeled.push_back(loop);
  auto q = make_seq(std::move(peeled));
  // The same observation stream at different speeds: equivalent so far.
  CHECK(!equivalent(p, q, {Store{}}, 1000).has_value());

  auto r = parse("while (1) { use(b); b = b + 2; }");
  auto cx = equivalent(p, r, {Store{}}, 1000);
  REQUIRE(cx.has_value());
  CHECK(cx->reason == "trace mismatch before fuel exhaustion");

  // a finished run never matches an exhausted one
  auto s1 = parse("x = 1;");
  auto s2 = parse("while (1) { skip; }");
  auto cx2 = equivalent(s1, s2, {Store{}}, 1000);
  REQUIRE(cx2.has_value());
  CHECK(cx2->reason == "status mismatch");
}
