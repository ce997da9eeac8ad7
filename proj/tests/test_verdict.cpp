#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gscope/verdict.hpp"

using namespace gscope;
using verdict::Confidence;
using verdict::EvidenceBundle;
using verdict::Rule;
using verdict::Status;

namespace {

// A bundle that triggers nothing: finite stable locus, clean solvable-free
// evidence withheld. Tests enable one signal at a time on top of this.
EvidenceBundle neutral() {
  EvidenceBundle e;
  e.growth.counts = {4, 4, 4};
  e.growth.monotone_growth = false;
  e.growth.infinity_threshold = 8;
  e.root_counts = {5, 5, 5};
  e.root_counts_increasing = false;
  e.escaped_generator_count = 0;
  e.group.degree = 5;
  e.group.generators = {permgroup::Perm::from_cycles(5, {{0, 1}})};
  e.group.escaped = {{}};
  e.group.closure_size = 2;
  e.group.closure_capped = false;
  e.group.clean_generator_count = 1;
  e.group.has_finite_support_gen = true;
  e.group.min_support = 2;
  return e;
}

bool fired(const verdict::Verdict& v, Rule r) {
  for (const auto& t : v.considered)
    if (t.rule == r) return t.fired;
  return false;
}

}  // namespace

TEST_CASE("every verdict considers all five rules in priority order") {
  auto v = verdict::decide(neutral());
  REQUIRE(v.considered.size() == 5);
  CHECK(v.considered[0].rule == Rule::Inf);
  CHECK(v.considered[1].rule == Rule::Wielandt);
  CHECK(v.considered[2].rule == Rule::FinUnsolvable);
  CHECK(v.considered[3].rule == Rule::FinSolvable);
  CHECK(v.considered[4].rule == Rule::NoEvidence);
  int count = 0;
  for (const auto& t : v.considered) count += t.fired ? 1 : 0;
  CHECK(count == 1);
  for (const auto& t : v.considered) CHECK(!t.reason.empty());
}

TEST_CASE("R-INF: monotone locus growth plus a finite-support generator") {
  auto e = neutral();
  e.growth.counts = {6, 10, 16};
  e.growth.monotone_growth = true;
  auto v = verdict::decide(e);
  CHECK(v.status == Status::Unsolvable);
  CHECK(v.rule == Rule::Inf);
  CHECK(v.confidence == Confidence::Heuristic);

  SUBCASE("needs the support witness") {
    e.group.has_finite_support_gen = false;
    e.group.solvable = false;  // keep a later rule available
    auto w = verdict::decide(e);
    CHECK(!fired(w, Rule::Inf));
    CHECK(w.rule == Rule::FinUnsolvable);
  }
  SUBCASE("needs the growth signal") {
    e.growth.monotone_growth = false;
    auto w = verdict::decide(e);
    CHECK(!fired(w, Rule::Inf));
  }
}

TEST_CASE("R-WIELANDT: capped closure, primitive, finite support") {
  auto e = neutral();
  e.group.closure_capped = true;
  e.group.closure_size = 20001;
  e.group.primitive = true;
  auto v = verdict::decide(e);
  CHECK(v.status == Status::Unsolvable);
  CHECK(v.rule == Rule::Wielandt);
  CHECK(v.confidence == Confidence::Heuristic);
}

TEST_CASE("R-WIELANDT: root growth substitutes for the cap") {
  auto e = neutral();
  e.root_counts = {5, 11, 15};
  e.root_counts_increasing = true;
  e.group.primitive = true;
  auto v = verdict::decide(e);
  CHECK(v.rule == Rule::Wielandt);
  CHECK(v.status == Status::Unsolvable);
}

TEST_CASE("R-WIELANDT is blocked without a primitivity witness") {
  auto e = neutral();
  e.group.closure_capped = true;

  SUBCASE("undecided primitivity") { e.group.primitive = std::nullopt; }
  SUBCASE("imprimitive") { e.group.primitive = false; }

  auto v = verdict::decide(e);
  CHECK(!fired(v, Rule::Wielandt));
  // Capped closure also blocks both finite rules.
  CHECK(v.rule == Rule::NoEvidence);
  CHECK(v.status == Status::Inconclusive);
}

TEST_CASE("a large uncapped unsolvable group is a criterion, not Wielandt") {
  auto e = neutral();
  e.group.closure_size = 120;
  e.group.primitive = true;
  e.group.solvable = false;
  e.group.derived_length = std::nullopt;
  auto v = verdict::decide(e);
  CHECK(!fired(v, Rule::Wielandt));
  CHECK(v.rule == Rule::FinUnsolvable);
  CHECK(v.status == Status::Unsolvable);
  CHECK(v.confidence == Confidence::Criterion);
}

TEST_CASE("R-FIN-SOLVABLE: clean finite solvable closure, stable locus") {
  auto e = neutral();
  e.group.solvable = true;
  e.group.derived_length = 2;
  auto v = verdict::decide(e);
  CHECK(v.status == Status::Solvable);
  CHECK(v.rule == Rule::FinSolvable);
  CHECK(v.confidence == Confidence::Criterion);

  SUBCASE("changing locus counts block it") {
    e.growth.counts = {4, 5, 6};
    auto w = verdict::decide(e);
    CHECK(!fired(w, Rule::FinSolvable));
    CHECK(w.status == Status::Inconclusive);
  }
}

TEST_CASE("escaped generators poison both finite rules") {
  auto e = neutral();
  e.escaped_generator_count = 1;

  SUBCASE("unsolvable series") { e.group.solvable = false; }
  SUBCASE("solvable series") { e.group.solvable = true; }

  auto v = verdict::decide(e);
  CHECK(!fired(v, Rule::FinUnsolvable));
  CHECK(!fired(v, Rule::FinSolvable));
  CHECK(v.status == Status::Inconclusive);
}

TEST_CASE("no tracked generators leaves the finite rules silent") {
  auto e = neutral();
  e.group.generators.clear();
  e.group.escaped.clear();
  e.group.clean_generator_count = 0;
  e.group.closure_size = 1;
  e.group.has_finite_support_gen = false;
  e.group.solvable = true;  // would fire R-FIN-SOLVABLE if gens existed
  auto v = verdict::decide(e);
  CHECK(v.rule == Rule::NoEvidence);
  CHECK(v.status == Status::Inconclusive);
}

TEST_CASE("priority: R-INF preempts a finite unsolvability witness") {
  auto e = neutral();
  e.growth.counts = {8, 12, 20};
  e.growth.monotone_growth = true;
  e.group.solvable = false;
  auto v = verdict::decide(e);
  CHECK(v.rule == Rule::Inf);
  CHECK(fired(v, Rule::Inf));
  CHECK(!fired(v, Rule::FinUnsolvable));
  // The trace still records why the later rule did not fire.
  CHECK(v.considered[2].reason == "an earlier rule already fired");
}

TEST_CASE("verdict strings") {
  CHECK(verdict::to_string(Status::Solvable) == "Solvable");
  CHECK(verdict::to_string(Status::Unsolvable) == "Unsolvable");
  CHECK(verdict::to_string(Status::Inconclusive) == "Inconclusive");
  CHECK(verdict::to_string(Rule::Inf) == "R-INF");
  CHECK(verdict::to_string(Rule::Wielandt) == "R-WIELANDT");
  CHECK(verdict::to_string(Rule::FinUnsolvable) == "R-FIN-UNSOLVABLE");
  CHECK(verdict::to_string(Rule::FinSolvable) == "R-FIN-SOLVABLE");
  CHECK(verdict::to_string(Rule::NoEvidence) == "R-NOEVIDENCE");
  CHECK(verdict::to_string(Confidence::Criterion) == "criterion");
  CHECK(verdict::to_string(Confidence::Heuristic) == "heuristic");
}

TEST_CASE("decide is deterministic") {
  auto e = neutral();
  e.group.solvable = true;
  auto a = verdict::decide(e);
  auto b = verdict::decide(e);
  REQUIRE(a.considered.size() == b.considered.size());
  CHECK(a.status == b.status);
  CHECK(a.rule == b.rule);
  for (std::size_t i = 0; i < a.considered.size(); ++i) {
    CHECK(a.considered[i].fired == b.considered[i].fired);
    CHECK(a.considered[i].reason == b.considered[i].reason);
  }
}
