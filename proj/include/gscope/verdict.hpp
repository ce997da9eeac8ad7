#pragma once

#include <string>
#include <vector>

#include "gscope/locus.hpp"
#include "gscope/permgroup.hpp"

namespace gscope::verdict {

enum class Status { Solvable, Unsolvable, Inconclusive };
enum class Rule { Inf, Wielandt, FinUnsolvable, FinSolvable, NoEvidence };
enum class Confidence { Criterion, Heuristic };

std::string to_string(Status s);
std::string to_string(Rule r);      // "R-INF", "R-WIELANDT", ...
std::string to_string(Confidence c);

/// Everything decide() looks at, assembled by the pipeline.
struct EvidenceBundle {
  locus::BranchLocus locus;
  locus::GrowthEvidence growth;       // critical-value counts over windows
  permgroup::GroupReport group;
  std::vector<long long> root_counts; // |f^-1(a0)| over the same windows
  bool root_counts_increasing = false;
  int escaped_generator_count = 0;
  int tower_depth = 0;
};

struct RuleTrace {
  Rule rule;
  bool fired = false;
  std::string reason;
};

struct Verdict {
  Status status = Status::Inconclusive;
  Rule rule = Rule::NoEvidence;
  Confidence confidence = Confidence::Heuristic;
  std::vector<RuleTrace> considered;  // all rules, priority order
};

/// First matching rule wins:
///   R-INF:            locus counts grow monotonically past the threshold and
///                     a finite-support generator is witnessed (heuristic).
///   R-WIELANDT:       capped closure or growing root counts, primitive
///                     witnessed action, finite-support generator (heuristic).
///   R-FIN-UNSOLVABLE: uncapped escape-free closure with an unsolvable
///                     derived series (criterion).
///   R-FIN-SOLVABLE:   uncapped escape-free closure, solvable series, and
///                     locus counts constant across window growth (criterion).
///   R-NOEVIDENCE:     anything else is Inconclusive.
/// Both R-FIN rules additionally require at least one tracked generator.
Verdict decide(const EvidenceBundle& e);

}  // namespace gscope::verdict
