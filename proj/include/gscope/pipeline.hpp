#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "gscope/expr.hpp"
#include "gscope/locus.hpp"
#include "gscope/permgroup.hpp"
#include "gscope/tracker.hpp"
#include "gscope/verdict.hpp"

namespace gscope::cli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IndexOutOfRange : public std::runtime_error {
 public:
  IndexOutOfRange() : std::runtime_error("loop index out of range") {}
};

struct Config {
  std::string expression;
  locus::Window domain{-8.0, 8.0, -16.0, 16.0, 4.0};
  locus::Window image{-8.0, 8.0, -8.0, 8.0, 4.0};
  locus::LocusParams tols;  // dedup, residual, order, pole, cluster tolerances
  int growth_steps = 3;
  long long closure_cap = 20000;
  int samples_circle = 64;
  int samples_segment = 32;
  std::string format = "json";  // or "text"
  std::string svg_path;         // empty = none
  std::string dump_path;        // empty = stdout (trace)
  int jobs = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Stop points for the shared pipeline.
enum class Stage { Locus, Monodromy, Full };

struct AnalysisResult {
  Config config;
  expr::Expr function = expr::Expr::constant(0.0);
  int tower_depth = 0;

  std::vector<locus::CriticalPoint> critical_points;
  locus::ScanDiagnostics scan;
  locus::BranchLocus locus;
  locus::GrowthEvidence growth;

  std::complex<double> base_point{};
  std::optional<tracker::RootSet> roots;  // empty: no root set anywhere tried
  tracker::MonodromyResult monodromy;

  permgroup::GroupReport group;
  std::vector<long long> root_counts;
  bool root_counts_increasing = false;

  verdict::Verdict verdict;
  std::vector<std::string> warnings;
};

/// Fill in missing images of an escape-tainted tracked permutation: the
/// unclaimed base indices are handed to the escaped sources in ascending
/// order, turning the witnessed partial map into a genuine permutation.
permgroup::Perm completed_permutation(const tracker::TrackedPermutation& tp);

/// Run locus -> tracker -> permgroup -> verdict up to the requested stage.
/// A base point whose fiber is empty falls back to nearby candidates; if
/// every candidate fails the result carries no roots and the verdict (when
/// asked for) is Inconclusive.
AnalysisResult run_pipeline(const Config& cfg, Stage stage);

/// Re-track one generator of a finished result, invoking sink at every
/// accepted step. Throws IndexOutOfRange for a bad generator index.
void trace_generator(const AnalysisResult& r, int generator_index,
                     const tracker::TraceSink& sink);

}  // namespace gscope::cli
