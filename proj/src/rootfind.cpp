#include "rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gscope::detail {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(cplx v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

bool before(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Walks the boundary phase of g - target, splitting intervals until each
// increment is below pi/2 so the wrapped difference is unambiguous.
struct PhaseWalk {
  const expr::Expr& g;
  cplx target;
  double tiny;
  bool failed = false;
  double total = 0.0;

  cplx sample(cplx z) {
    expr::EvalResult r = expr::evaluate(g, z);
    if (r.pole || !finite(r.value)) {
      failed = true;
      return {1.0, 0.0};
    }
    cplx v = r.value - target;
    if (std::abs(v) < tiny) {
      failed = true;
      return {1.0, 0.0};
    }
    return v;
  }

  void walk(cplx z0, cplx v0, cplx z1, cplx v1, int depth) {
    if (failed) return;
    double d = std::remainder(std::arg(v1) - std::arg(v0), kTwoPi);
    if (std::abs(d) <= 0.5 * std::numbers::pi) {
      total += d;
      return;
    }
    if (depth >= 24) {
      failed = true;
      return;
    }
    cplx zm = 0.5 * (z0 + z1);
    cplx vm = sample(zm);
    if (failed) return;
    walk(z0, v0, zm, vm, depth + 1);
    walk(zm, vm, z1, v1, depth + 1);
  }
};

struct Accepted {
  std::vector<RootCandidate> roots;
  std::vector<int> mult;  // 0 = not yet measured
};

bool try_add(Accepted& acc, cplx z, double residual, double dedup_tol) {
  for (const auto& r : acc.roots)
    if (std::abs(r.z - z) <= dedup_tol) return false;
  acc.roots.push_back({z, residual});
  acc.mult.push_back(0);
  return true;
}

// Multiplicity of an isolated root, measured by the winding number around a
// small box. Falls back to 1 when the box measurement is unreliable.
int root_multiplicity(const expr::Expr& g, cplx target, cplx z,
                      double dedup_tol) {
  double s = std::max(1e-6, 50.0 * dedup_tol) * (1.0 + std::abs(z));
  locus::Window box{z.real() - s, z.real() + s, z.imag() - s, z.imag() + s, 1.0};
  bool ok = false;
  int w = winding_number(g, target, box, &ok);
  return (ok && w >= 1) ? w : 1;
}

struct SearchContext {
  const expr::Expr& g;
  const expr::Expr& dg;
  cplx target;
  const locus::Window& window;  // strict containment filter
  cplx center;
  double escape_radius;
  double dedup_tol;
  double residual_tol;
  RootSearchStats* stats;
};

// Multiplicity-weighted count of accepted roots inside rect minus the rect's
// winding number would be the surplus; returns winding minus that count, so
// a positive value means roots are still missing.
int deficit(SearchContext& ctx, Accepted& acc, const locus::Window& rect,
            int winding) {
  int count = 0;
  for (const auto& r : acc.roots)
    if (rect.contains(r.z)) ++count;
  if (winding <= count) return winding - count;  // mult >= 1 each
  int sum = 0;
  for (std::size_t i = 0; i < acc.roots.size(); ++i)
    if (rect.contains(acc.roots[i].z)) {
      if (acc.mult[i] == 0)
        acc.mult[i] = root_multiplicity(ctx.g, ctx.target, acc.roots[i].z,
                                        ctx.dedup_tol);
      sum += acc.mult[i];
    }
  return winding - sum;
}

void reseed_rect(SearchContext& ctx, Accepted& acc, const locus::Window& rect) {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      cplx seed{rect.re_min + (rect.re_max - rect.re_min) * (2 * a + 1) / 8.0,
                rect.im_min + (rect.im_max - rect.im_min) * (2 * b + 1) / 8.0};
      cplx z;
      double res;
      if (newton_refine(ctx.g, ctx.dg, ctx.target, seed, ctx.residual_tol,
                        ctx.center, ctx.escape_radius, &z, &res) &&
          ctx.window.contains(z)) {
        if (try_add(acc, z, res, ctx.dedup_tol) && ctx.stats)
          ++ctx.stats->subdivision_roots;
      }
    }
}

void subdivide(SearchContext& ctx, Accepted& acc, const locus::Window& rect,
               int depth) {
  bool ok = false;
  int w = winding_number(ctx.g, ctx.target, rect, &ok);
  if (!ok || deficit(ctx, acc, rect, w) <= 0) return;
  reseed_rect(ctx, acc, rect);
  if (deficit(ctx, acc, rect, w) <= 0) return;
  double width = rect.re_max - rect.re_min;
  double height = rect.im_max - rect.im_min;
  if (depth >= 6 || std::min(width, height) < 1e4 * ctx.dedup_tol) return;
  double rm = 0.5 * (rect.re_min + rect.re_max);
  double im = 0.5 * (rect.im_min + rect.im_max);
  const locus::Window quads[4] = {
      {rect.re_min, rm, rect.im_min, im, rect.grid_density},
      {rm, rect.re_max, rect.im_min, im, rect.grid_density},
      {rect.re_min, rm, im, rect.im_max, rect.grid_density},
      {rm, rect.re_max, im, rect.im_max, rect.grid_density},
  };
  for (const auto& q : quads) subdivide(ctx, acc, q, depth + 1);
}

}  // namespace

bool newton_refine(const expr::Expr& g, const expr::Expr& dg, cplx target,
                   cplx seed, double residual_tol, cplx center,
                   double escape_radius, cplx* out, double* out_residual) {
  cplx x = seed;
  const int kMaxIter = 100;
  double prev_step = -1.0;
  int linear_run = 0;
  for (int it = 0; it < kMaxIter; ++it) {
    expr::EvalResult v = expr::evaluate(g, x);
    if (v.pole || !finite(v.value)) return false;
    if (std::abs(v.value - target) == 0.0) break;
    expr::EvalResult d = expr::evaluate(dg, x);
    if (d.pole || !finite(d.value) || std::abs(d.value) < 1e-290) return false;
    cplx step = (v.value - target) / d.value;
    if (!finite(step)) return false;
    x -= step;
    if (std::abs(x - center) > escape_radius) return false;
    double mag = std::abs(step);
    // Relative fixed-point test: an absolute floor would freeze refinement
    // of roots at the origin while their high derivatives still see the
    // leftover offset.
    if (mag <= 1e-15 * std::abs(x)) break;
    // Plain Newton is only linear at a root of multiplicity m, shrinking the
    // error by (m-1)/m per step. A steady geometric decay reveals m; stepping
    // the extra (m-1)*step recovers fast convergence.
    if (prev_step > 0.0) {
      double ratio = mag / prev_step;
      if (ratio > 0.3 && ratio < 0.995) {
        if (++linear_run >= 4) {
          double extra = std::min(1.0 / (1.0 - ratio) - 1.0, 63.0);
          x -= extra * step;
          if (std::abs(x - center) > escape_radius) return false;
          linear_run = 0;
          prev_step = -1.0;
          continue;
        }
      } else {
        linear_run = 0;
      }
    }
    prev_step = mag;
  }
  expr::EvalResult v = expr::evaluate(g, x);
  if (v.pole || !finite(v.value)) return false;
  double res = std::abs(v.value - target);
  if (res > residual_tol * (1.0 + std::abs(target))) return false;
  *out = x;
  *out_residual = res;
  return true;
}

int winding_number(const expr::Expr& g, cplx target, const locus::Window& rect,
                   bool* ok) {
  double size = std::max(rect.re_max - rect.re_min, rect.im_max - rect.im_min);
  for (int attempt = 0; attempt < 3; ++attempt) {
    // When a zero sits on (or hugs) the boundary, pad the rectangle a hair
    // and try again; the winding count of interior points is unchanged.
    double pad = attempt * 3e-6 * (1.0 + size);
    double re0 = rect.re_min - pad, re1 = rect.re_max + pad;
    double im0 = rect.im_min - pad, im1 = rect.im_max + pad;
    PhaseWalk pw{g, target, 1e-13 * (1.0 + std::abs(target))};
    const cplx corners[5] = {
        {re0, im0}, {re1, im0}, {re1, im1}, {re0, im1}, {re0, im0}};
    for (int e = 0; e < 4 && !pw.failed; ++e) {
      const int kInitialSamples = 16;
      cplx z0 = corners[e], z1 = corners[e + 1];
      cplx prev_z = z0;
      cplx prev_v = pw.sample(prev_z);
      for (int s = 1; s <= kInitialSamples && !pw.failed; ++s) {
        cplx zs = z0 + (z1 - z0) * (static_cast<double>(s) / kInitialSamples);
        cplx vs = pw.sample(zs);
        if (pw.failed) break;
        pw.walk(prev_z, prev_v, zs, vs, 0);
        prev_z = zs;
        prev_v = vs;
      }
    }
    if (pw.failed) continue;
    double turns = pw.total / kTwoPi;
    long n = std::lround(turns);
    if (std::abs(turns - static_cast<double>(n)) > 0.25) continue;
    if (ok) *ok = true;
    return static_cast<int>(n);
  }
  if (ok) *ok = false;
  return 0;
}

std::vector<cplx> grid_seeds(const locus::Window& w) {
  double span_re = w.re_max - w.re_min;
  double span_im = w.im_max - w.im_min;
  int nr = std::max(2, static_cast<int>(std::lround(span_re * w.grid_density)) + 1);
  int ni = std::max(2, static_cast<int>(std::lround(span_im * w.grid_density)) + 1);
  std::vector<cplx> seeds;
  seeds.reserve(static_cast<std::size_t>(nr) * ni);
  for (int i = 0; i < nr; ++i) {
    double re = w.re_min + span_re * i / (nr - 1);
    for (int j = 0; j < ni; ++j)
      seeds.emplace_back(re, w.im_min + span_im * j / (ni - 1));
  }
  return seeds;
}

std::vector<RootCandidate> roots_from_seeds(const expr::Expr& g, cplx target,
                                            const locus::Window& w,
                                            const std::vector<cplx>& seeds,
                                            double dedup_tol,
                                            double residual_tol,
                                            RootSearchStats* stats) {
  RootSearchStats local;
  if (!stats) stats = &local;
  expr::Expr dg = expr::differentiate(g);
  SearchContext ctx{g,      dg,
                    target, w,
                    w.center(), 2.0 + 3.0 * w.half_diagonal(),
                    dedup_tol,  residual_tol,
                    stats};

  std::vector<RootCandidate> converged;
  for (cplx seed : seeds) {
    ++stats->seeds;
    cplx z;
    double res;
    if (!newton_refine(g, dg, target, seed, residual_tol, ctx.center,
                       ctx.escape_radius, &z, &res)) {
      ++stats->dropped_nonconverged;
      continue;
    }
    ++stats->converged;
    if (!w.contains(z)) {
      ++stats->dropped_out_of_window;
      continue;
    }
    converged.push_back({z, res});
  }
  std::sort(converged.begin(), converged.end(),
            [](const RootCandidate& a, const RootCandidate& b) {
              return before(a.z, b.z);
            });
  Accepted acc;
  for (const auto& c : converged) try_add(acc, c.z, c.residual, dedup_tol);

  bool ok = false;
  int winding = winding_number(g, target, w, &ok);
  stats->winding_ok = ok;
  stats->winding = winding;
  if (ok && deficit(ctx, acc, w, winding) > 0) subdivide(ctx, acc, w, 0);

  std::sort(acc.roots.begin(), acc.roots.end(),
            [](const RootCandidate& a, const RootCandidate& b) {
              return before(a.z, b.z);
            });
  return acc.roots;
}

std::vector<RootCandidate> find_window_roots(const expr::Expr& g, cplx target,
                                             const locus::Window& w,
                                             double dedup_tol,
                                             double residual_tol,
                                             RootSearchStats* stats) {
  return roots_from_seeds(g, target, w, grid_seeds(w), dedup_tol, residual_tol,
                          stats);
}

}  // namespace gscope::detail
