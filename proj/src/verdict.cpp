#include "gscope/verdict.hpp"

#include <algorithm>

namespace gscope::verdict {

std::string to_string(Status s) {
  switch (s) {
    case Status::Solvable: return "Solvable";
    case Status::Unsolvable: return "Unsolvable";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::Inf: return "R-INF";
    case Rule::Wielandt: return "R-WIELANDT";
    case Rule::FinUnsolvable: return "R-FIN-UNSOLVABLE";
    case Rule::FinSolvable: return "R-FIN-SOLVABLE";
    case Rule::NoEvidence: return "R-NOEVIDENCE";
  }
  return "R-NOEVIDENCE";
}

std::string to_string(Confidence c) {
  return c == Confidence::Criterion ? "criterion" : "heuristic";
}

namespace {

// Appends the trace and, on the first firing rule, locks in the verdict.
struct RuleLedger {
  Verdict v;
  bool decided = false;

  void rule(Rule r, bool fired, std::string reason, Status status,
            Confidence confidence) {
    if (decided && fired) {  // priority: later rules never fire
      fired = false;
      reason = "an earlier rule already fired";
    }
    v.considered.push_back({r, fired, std::move(reason)});
    if (fired) {
      v.status = status;
      v.rule = r;
      v.confidence = confidence;
      decided = true;
    }
  }
};

}  // namespace

Verdict decide(const EvidenceBundle& e) {
  RuleLedger led;
  const auto& g = e.group;
  const bool have_gens = !g.generators.empty();
  const bool clean = e.escaped_generator_count == 0;
  const bool finite_closure = have_gens && !g.closure_capped;

  // R-INF
  {
    bool fired = e.growth.monotone_growth && g.has_finite_support_gen;
    std::string reason;
    if (fired)
      reason =
          "critical-value counts grow monotonically past the infinity "
          "threshold and a finite-support generator is witnessed";
    else if (!e.growth.monotone_growth)
      reason = "critical-value counts do not grow monotonically past the "
               "infinity threshold";
    else
      reason = "no escape-free generator witnesses finite support";
    led.rule(Rule::Inf, fired, reason, Status::Unsolvable,
             Confidence::Heuristic);
  }

  // R-WIELANDT
  {
    bool size_signal = g.closure_capped || e.root_counts_increasing;
    bool primitive = g.primitive.has_value() && *g.primitive;
    bool fired = size_signal && primitive && g.has_finite_support_gen;
    std::string reason;
    if (fired)
      reason = g.closure_capped
                   ? "closure exceeded the cap while the witnessed action is "
                     "primitive with a finite-support generator"
                   : "root counts grow with the window while the witnessed "
                     "action is primitive with a finite-support generator";
    else if (!size_signal)
      reason = "closure stayed under the cap and root counts do not grow";
    else if (!primitive)
      reason = "witnessed action is not known to be primitive";
    else
      reason = "no escape-free generator witnesses finite support";
    led.rule(Rule::Wielandt, fired, reason, Status::Unsolvable,
             Confidence::Heuristic);
  }

  // R-FIN-UNSOLVABLE
  {
    bool unsolvable = g.solvable.has_value() && !*g.solvable;
    bool fired = finite_closure && clean && unsolvable;
    std::string reason;
    if (fired)
      reason = "escape-free generators close to a finite group whose derived "
               "series stalls above the trivial group";
    else if (!have_gens)
      reason = "no tracked generators";
    else if (g.closure_capped)
      reason = "closure exceeded the cap";
    else if (!clean)
      reason = "some generators have escaped branches";
    else
      reason = "derived series does not witness unsolvability";
    led.rule(Rule::FinUnsolvable, fired, reason, Status::Unsolvable,
             Confidence::Criterion);
  }

  // R-FIN-SOLVABLE
  {
    bool solvable = g.solvable.has_value() && *g.solvable;
    bool counts_stable =
        !e.growth.counts.empty() &&
        std::all_of(e.growth.counts.begin(), e.growth.counts.end(),
                    [&](int c) { return c == e.growth.counts.front(); });
    bool fired = finite_closure && clean && solvable && counts_stable;
    std::string reason;
    if (fired)
      reason = "escape-free generators close to a finite solvable group and "
               "the branch locus is stable across window growth";
    else if (!have_gens)
      reason = "no tracked generators";
    else if (g.closure_capped)
      reason = "closure exceeded the cap";
    else if (!clean)
      reason = "some generators have escaped branches";
    else if (!solvable)
      reason = "derived series does not witness solvability";
    else
      reason = "branch-locus counts change across window growth";
    led.rule(Rule::FinSolvable, fired, reason, Status::Solvable,
             Confidence::Criterion);
  }

  // R-NOEVIDENCE
  led.rule(Rule::NoEvidence, !led.decided,
           led.decided ? "an earlier rule already fired"
                       : "no rule matched the collected evidence",
           Status::Inconclusive, Confidence::Heuristic);
  return led.v;
}

}  // namespace gscope::verdict
