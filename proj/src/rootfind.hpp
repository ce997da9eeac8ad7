#pragma once

#include <complex>
#include <vector>

#include "gscope/expr.hpp"
#include "gscope/locus.hpp"

// Internal root search shared by the locus scanner and the tracker:
// Newton iteration from grid seeds, deterministic dedup, and an
// argument-principle subdivision backstop for roots the grid misses.
namespace gscope::detail {

using cplx = std::complex<double>;

struct RootCandidate {
  cplx z;
  double residual;  // |g(z) - target| at acceptance
};

struct RootSearchStats {
  int seeds = 0;
  int converged = 0;
  int dropped_nonconverged = 0;
  int dropped_out_of_window = 0;
  int subdivision_roots = 0;
  bool winding_ok = false;
  int winding = 0;
};

// Newton refinement of one seed for g(x) = target. Runs to a fixed point or
// the iteration cap, then accepts on residual. Gives up early once the
// iterate leaves escape_radius around center.
bool newton_refine(const expr::Expr& g, const expr::Expr& dg, cplx target,
                   cplx seed, double residual_tol, cplx center,
                   double escape_radius, cplx* out, double* out_residual);

// Winding number of g - target along the rectangle boundary via adaptive
// phase sampling. ok is cleared when a sample lands on a near-zero of g or
// the accumulated phase is not close to an integer multiple of 2*pi.
// Counts zeros minus poles inside, each with multiplicity.
int winding_number(const expr::Expr& g, cplx target, const locus::Window& rect,
                   bool* ok);

// Roots of g(x) = target inside w, refined from the given seeds, deduplicated
// at dedup_tol in sorted (re, im) order. When the boundary winding number
// exceeds the multiplicity-weighted count of found roots, quadrant
// subdivision with local reseeding hunts for the missing ones.
std::vector<RootCandidate> roots_from_seeds(const expr::Expr& g, cplx target,
                                            const locus::Window& w,
                                            const std::vector<cplx>& seeds,
                                            double dedup_tol,
                                            double residual_tol,
                                            RootSearchStats* stats = nullptr);

// Uniform seed grid over the window at its grid_density, endpoints included.
std::vector<cplx> grid_seeds(const locus::Window& w);

// grid_seeds + roots_from_seeds in one call.
std::vector<RootCandidate> find_window_roots(const expr::Expr& g, cplx target,
                                             const locus::Window& w,
                                             double dedup_tol,
                                             double residual_tol,
                                             RootSearchStats* stats = nullptr);

}  // namespace gscope::detail
