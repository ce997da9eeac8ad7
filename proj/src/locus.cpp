#include "gscope/locus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "rootfind.hpp"

namespace gscope::locus {

namespace {

bool finite(std::complex<double> v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

bool before(std::complex<double> a, std::complex<double> b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::string format_value(std::complex<double> v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g%+.6gi", v.real(), v.imag());
  return buf;
}

}  // namespace

double Window::half_diagonal() const {
  return 0.5 * std::hypot(re_max - re_min, im_max - im_min);
}

Window Window::scaled(double factor) const {
  std::complex<double> c = center();
  double hw = 0.5 * (re_max - re_min) * factor;
  double hh = 0.5 * (im_max - im_min) * factor;
  return {c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh,
          grid_density};
}

int critical_order(const expr::Expr& f, std::complex<double> x_c,
                   const LocusParams& params) {
  expr::Expr d = expr::differentiate(f);
  auto magnitude = [&](const expr::Expr& e) {
    expr::EvalResult r = expr::evaluate(e, x_c);
    if (r.pole || !finite(r.value))
      return std::numeric_limits<double>::infinity();
    return std::abs(r.value);
  };
  std::vector<double> mags{magnitude(d)};  // |f^(k)|, k = 1..
  for (int m = 1; m <= params.max_order; ++m) {
    d = expr::differentiate(d);  // f^(m+1)
    double next = magnitude(d);
    mags.push_back(next);
    // Nonzero means clearing order_tol against its own scale; the earlier
    // derivatives must vanish against that same scale, which absorbs the
    // factorial growth of high derivatives at a noisy location.
    if (next < params.order_tol) continue;
    double vanish_bound = params.order_tol * std::max(1.0, next);
    bool all_vanish = true;
    for (int k = 0; k < m; ++k)
      if (!(mags[static_cast<std::size_t>(k)] < vanish_bound)) {
        all_vanish = false;
        break;
      }
    if (all_vanish) return m;
  }
  throw OrderOverflow(x_c, params.max_order);
}

std::vector<CriticalPoint> find_critical_points(const expr::Expr& f,
                                                const Window& w,
                                                const LocusParams& params,
                                                ScanDiagnostics* diag) {
  expr::Expr df = expr::differentiate(f);
  if (df.is_constant({0.0, 0.0})) throw DegenerateDerivative();

  detail::RootSearchStats stats;
  auto candidates = detail::find_window_roots(df, {0.0, 0.0}, w,
                                              params.dedup_tol,
                                              params.residual_tol, &stats);
  ScanDiagnostics local;
  if (!diag) diag = &local;
  diag->seeds += stats.seeds;
  diag->converged += stats.converged;
  diag->dropped_nonconverged += stats.dropped_nonconverged;
  diag->dropped_out_of_window += stats.dropped_out_of_window;
  diag->subdivision_roots += stats.subdivision_roots;

  std::vector<CriticalPoint> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    expr::EvalResult fv = expr::evaluate(f, c.z, params.pole_tol);
    if (fv.pole || !finite(fv.value)) {
      ++diag->dropped_pole;
      continue;
    }
    int order = 0;
    try {
      order = critical_order(f, c.z, params);
    } catch (const OrderOverflow&) {
      ++diag->dropped_order_overflow;
      diag->warnings.push_back("order overflow at x = " + format_value(c.z) +
                               ", point excluded");
      continue;
    }
    out.push_back({c.z, order, fv.value, c.residual});
  }
  return out;
}

BranchLocus branch_locus(const std::vector<CriticalPoint>& points,
                         double cluster_tol) {
  if (!(cluster_tol > 0.0))
    throw std::invalid_argument("cluster_tol must be positive");
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto pair_tol = [&](std::size_t i, std::size_t j) {
    return cluster_tol * (1.0 + std::max(std::abs(points[i].value),
                                         std::abs(points[j].value)));
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(points[i].value - points[j].value) <= pair_tol(i, j))
        parent[find(i)] = find(j);

  BranchLocus result;
  result.cluster_tol = cluster_tol;
  std::vector<std::size_t> roots;  // one entry per cluster, in input order
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i);
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      roots.push_back(r);
      groups.push_back({i});
    } else {
      groups[static_cast<std::size_t>(it - roots.begin())].push_back(i);
    }
  }

  struct Cluster {
    std::complex<double> rep;
    std::vector<CriticalPoint> members;
  };
  std::vector<Cluster> clusters;
  clusters.reserve(groups.size());
  for (const auto& g : groups) {
    Cluster c;
    for (std::size_t idx : g) c.members.push_back(points[idx]);
    std::sort(c.members.begin(), c.members.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) {
                return before(a.location, b.location);
              });
    const CriticalPoint* best = &c.members.front();
    for (const auto& m : c.members) {
      if (m.newton_residual < best->newton_residual ||
          (m.newton_residual == best->newton_residual &&
           before(m.value, best->value)))
        best = &m;
    }
    c.rep = best->value;
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return before(a.rep, b.rep); });
  for (auto& c : clusters) {
    result.values.push_back(c.rep);
    result.members.push_back(std::move(c.members));
  }

  // Near-merges under twice the tolerance make cluster identity fragile;
  // surface the first such pair as a warning.
  for (std::size_t i = 0; i < n && result.warnings.empty(); ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (find(i) == find(j)) continue;
      if (std::abs(points[i].value - points[j].value) <= 2.0 * pair_tol(i, j)) {
        result.warnings.push_back(
            "cluster ambiguity: values " + format_value(points[i].value) +
            " and " + format_value(points[j].value) +
            " separate at the cluster tolerance but merge at twice it");
        break;
      }
    }
  return result;
}

GrowthEvidence infinite_locus_evidence(const expr::Expr& f, const Window& base,
                                       int growth_steps,
                                       const LocusParams& params) {
  if (growth_steps < 2)
    throw std::invalid_argument("growth_steps must be at least 2");
  GrowthEvidence ev;
  ev.infinity_threshold = params.infinity_threshold;
  for (int k = 1; k <= growth_steps; ++k) {
    auto pts = find_critical_points(f, base.scaled(k), params);
    ev.counts.push_back(
        static_cast<int>(branch_locus(pts, params.cluster_tol).values.size()));
  }
  bool strict = true;
  for (std::size_t i = 1; i < ev.counts.size(); ++i)
    if (ev.counts[i] <= ev.counts[i - 1]) strict = false;
  ev.monotone_growth = strict && ev.counts.back() >= params.infinity_threshold;
  return ev;
}

}  // namespace gscope::locus
