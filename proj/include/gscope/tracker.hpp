#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gscope/expr.hpp"
#include "gscope/locus.hpp"

namespace gscope::tracker {

class EmptyRootSet : public std::runtime_error {
 public:
  EmptyRootSet() : std::runtime_error("no roots of f(x) = a0 in the window") {}
};

class NoRegularValue : public std::runtime_error {
 public:
  NoRegularValue()
      : std::runtime_error("every base-point candidate sits on the locus") {}
};

class PerturbationFailure : public std::runtime_error {
 public:
  PerturbationFailure()
      : std::runtime_error("cannot steer the path clear of a forbidden point") {}
};

class TrackingCollision : public std::runtime_error {
 public:
  explicit TrackingCollision(const std::string& what)
      : std::runtime_error(what) {}
};

class StepUnderflow : public std::runtime_error {
 public:
  StepUnderflow() : std::runtime_error("continuation step fell below the floor") {}
};

/// The d local branches over a regular base value a0: roots of f(x) = a0
/// inside the window, sorted by (re, im).
struct RootSet {
  std::complex<double> base_value;
  std::vector<std::complex<double>> roots;
  std::vector<double> residuals;  // |f(root) - a0|, aligned with roots
  locus::Window window;

  /// Minimum pairwise root distance. With fewer than two roots there is no
  /// pair to collide, so the window half-diagonal stands in.
  double separation() const;
};

/// A based loop in the a-plane: radial segment from base to the circle of
/// the given radius around center, one full turn, and the segment back.
struct LoopSpec {
  std::complex<double> base;
  std::complex<double> center;
  double radius = 0.0;
  int samples_segment = 32;
  int samples_circle = 64;
  bool clockwise = false;  // default orientation is counterclockwise
};

/// Permutation of root indices induced by one loop. mapping[j] is the index
/// of the base root the continuation of root j returned to, or -1 when that
/// branch escaped (left 1.5x the window, or matched nothing within
/// separation/4). Matching is injective; it is onto exactly when no branch
/// escaped.
struct TrackedPermutation {
  LoopSpec loop;
  std::vector<int> mapping;
  std::vector<int> escaped;  // sorted
  double max_match_distance = 0.0;
  double max_residual = 0.0;
};

struct TrackerParams {
  int samples_segment = 32;
  int samples_circle = 64;
  double residual_tol = 1e-10;  // corrector target, scaled by (1 + |a|)
  int escape_retries = 3;       // radius halvings after a generator sheds roots
  int jobs = 1;                 // concurrent loops in monodromy_generators
  /// When set, loops are built only around locus representatives inside this
  /// window (the image-plane viewport); all representatives still shape loop
  /// radii and path perturbation.
  std::optional<locus::Window> image_window;
};

/// Called after every accepted continuation step with the arc-length
/// parameter in [0, 1], the current a, and all root positions (escaped ones
/// stay frozen where they were last seen).
using TraceSink = std::function<void(
    double t, std::complex<double> a,
    const std::vector<std::complex<double>>& positions)>;

/// Point of the image window farthest from the branch locus, over the
/// window's seed grid; ties break toward smallest (re, im). An empty locus
/// yields the window center. Throws NoRegularValue when no candidate clears
/// the locus.
std::complex<double> choose_base_point(const locus::BranchLocus& locus,
                                       const locus::Window& image_window);

/// Roots of f(x) = a0 inside w. Throws EmptyRootSet when none are found.
RootSet find_roots(const expr::Expr& f, std::complex<double> a0,
                   const locus::Window& w,
                   const locus::LocusParams& params = {});

/// Waypoints of the loop, closed: front() == back() == loop.base.
std::vector<std::complex<double>> build_loop_path(const LoopSpec& loop);

/// Nudge waypoints until every one clears each forbidden point by more than
/// margin/4, moving no waypoint farther than margin from where it was.
/// Endpoints are never moved; a forbidden point within margin/4 of an
/// endpoint throws PerturbationFailure.
std::vector<std::complex<double>> perturb_path(
    std::vector<std::complex<double>> path,
    const std::vector<std::complex<double>>& forbidden, double margin);

/// Continue every root of rs along the explicit closed path (predictor on
/// dx/da = 1/f', Newton corrector, adaptive step halving) and match the
/// returns against the base roots. loop is carried as metadata and must
/// start at rs.base_value.
TrackedPermutation track_path(const expr::Expr& f, const RootSet& rs,
                              const std::vector<std::complex<double>>& path,
                              const LoopSpec& loop,
                              const TrackerParams& params = {},
                              const TraceSink& sink = nullptr);

/// track_path along build_loop_path(loop).
TrackedPermutation track_loop(const expr::Expr& f, const RootSet& rs,
                              const LoopSpec& loop,
                              const TrackerParams& params = {},
                              const TraceSink& sink = nullptr);

struct GeneratorFailure {
  int locus_index = -1;
  std::string message;
};

struct MonodromyResult {
  std::vector<TrackedPermutation> generators;  // locus index order
  std::vector<int> locus_indices;              // aligned with generators
  std::vector<GeneratorFailure> failures;
};

/// One loop per branch-locus representative (restricted to
/// params.image_window when set), radius min(nearest other representative,
/// distance to base)/3, connecting segments perturbed away from the other
/// representatives. A generator that sheds roots is retried at half radius
/// up to params.escape_retries times; if every retry still escapes, the
/// first attempt is kept. Failed loops are excluded and recorded. An empty
/// locus yields a single probe loop around the origin (the conventional
/// omitted-value candidate), skipped when the base point itself is at the
/// origin.
MonodromyResult monodromy_generators(const expr::Expr& f, const RootSet& rs,
                                     const locus::BranchLocus& locus,
                                     const TrackerParams& params = {});

}  // namespace gscope::tracker
