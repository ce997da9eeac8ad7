#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "gscope/expr.hpp"

namespace gscope::locus {

/// Rectangular search region in the complex plane with a seed-grid density.
struct Window {
  double re_min = -8.0;
  double re_max = 8.0;
  double im_min = -16.0;
  double im_max = 16.0;
  double grid_density = 4.0;  // seed points per unit length

  bool contains(std::complex<double> z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
           z.imag() <= im_max;
  }
  std::complex<double> center() const {
    return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)};
  }
  double half_diagonal() const;
  /// Same center, half-widths multiplied by factor. Density is unchanged.
  Window scaled(double factor) const;
};

/// Thrown when f' folds to the zero constant, i.e. f is constant.
class DegenerateDerivative : public std::runtime_error {
 public:
  DegenerateDerivative() : std::runtime_error("derivative is identically zero") {}
};

/// Thrown when the vanishing-derivative chain at a point exceeds the order
/// bound; signals a suspected non-isolated or essential degeneracy.
class OrderOverflow : public std::runtime_error {
 public:
  OrderOverflow(std::complex<double> where, int bound)
      : std::runtime_error("critical point order exceeds bound"),
        where_(where),
        bound_(bound) {}
  std::complex<double> where() const { return where_; }
  int bound() const { return bound_; }

 private:
  std::complex<double> where_;
  int bound_;
};

struct LocusParams {
  double dedup_tol = 1e-8;     // min distance between reported points
  double residual_tol = 1e-10; // |f'(x_c)| acceptance bound
  double order_tol = 1e-7;     // derivative-vanishing threshold
  double pole_tol = 1e-6;      // candidates this close to a pole of f are dropped
  double cluster_tol = 1e-6;   // branch-locus clustering, scaled by (1+|a|)
  int max_order = 12;
  int infinity_threshold = 8;  // distinct values needed for growth evidence
};

/// A refined root of f' with its vanishing order and critical value.
struct CriticalPoint {
  std::complex<double> location;  // x_c
  int order = 1;                  // m: f'..f^(m) vanish, f^(m+1) does not
  std::complex<double> value;     // a_c = f(x_c)
  double newton_residual = 0.0;   // |f'(x_c)| after refinement
};

struct ScanDiagnostics {
  int seeds = 0;
  int converged = 0;
  int dropped_nonconverged = 0;
  int dropped_out_of_window = 0;
  int dropped_pole = 0;
  int dropped_order_overflow = 0;
  int subdivision_roots = 0;
  std::vector<std::string> warnings;
};

/// Clustered critical values. values[i] is the representative of members[i];
/// the representative is the member value with the smallest newton_residual.
struct BranchLocus {
  std::vector<std::complex<double>> values;
  std::vector<std::vector<CriticalPoint>> members;
  double cluster_tol = 0.0;
  std::vector<std::string> warnings;
};

struct GrowthEvidence {
  std::vector<int> counts;  // distinct critical values per scaled window
  bool monotone_growth = false;
  int infinity_threshold = 8;
};

/// Newton-refined roots of f' seeded from the window grid, deduplicated,
/// ordered by (re, im), each tagged with order and critical value.
/// Throws DegenerateDerivative when f is constant.
std::vector<CriticalPoint> find_critical_points(const expr::Expr& f,
                                                const Window& w,
                                                const LocusParams& params = {},
                                                ScanDiagnostics* diag = nullptr);

/// Smallest m >= 1 such that f'..f^(m) vanish at x_c under order_tol while
/// f^(m+1) does not. Caller guarantees |f'(x_c)| is already below the
/// residual tolerance. Throws OrderOverflow past params.max_order.
int critical_order(const expr::Expr& f, std::complex<double> x_c,
                   const LocusParams& params = {});

/// Single-linkage clustering of the critical values at tolerance
/// cluster_tol*(1+max(|a|,|b|)) per comparison. Near-merges at twice the
/// tolerance are reported as warnings.
BranchLocus branch_locus(const std::vector<CriticalPoint>& points,
                         double cluster_tol);

/// Distinct-critical-value counts over windows scaled by 1..growth_steps.
/// monotone_growth is true iff the counts strictly increase at every step
/// and the final count reaches the infinity threshold.
GrowthEvidence infinite_locus_evidence(const expr::Expr& f, const Window& base,
                                       int growth_steps,
                                       const LocusParams& params = {});

}  // namespace gscope::locus
