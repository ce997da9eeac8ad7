#include "gscope/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "rootfind.hpp"

namespace gscope::tracker {

namespace {

using cplx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Newton corrector for f(x) = a from a predictor point. A pole, a non-finite
// iterate, or a near-zero derivative reject the step instead of being
// regularized: on an admissible path they indicate the step is too long.
bool correct_at(const expr::Expr& f, const expr::Expr& df, cplx a, cplx x,
                double residual_tol, cplx* out) {
  double tol = residual_tol * (1.0 + std::abs(a));
  for (int iter = 0; iter < 12; ++iter) {
    expr::EvalResult v = expr::evaluate(f, x);
    if (v.pole || !finite(v.value)) return false;
    cplx r = v.value - a;
    if (std::abs(r) <= tol) {
      *out = x;
      return true;
    }
    expr::EvalResult dv = expr::evaluate(df, x);
    if (dv.pole || !finite(dv.value)) return false;
    if (std::abs(dv.value) < 1e-13 * (1.0 + std::abs(v.value))) return false;
    x -= r / dv.value;
    if (!finite(x)) return false;
  }
  return false;
}

}  // namespace

double RootSet::separation() const {
  if (roots.size() < 2) return window.half_diagonal();
  double best = kInf;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      best = std::min(best, std::abs(roots[i] - roots[j]));
  return best;
}

std::complex<double> choose_base_point(const locus::BranchLocus& locus,
                                       const locus::Window& image_window) {
  if (locus.values.empty()) return image_window.center();
  double clearance = 1e-9 * (1.0 + image_window.half_diagonal());
  double best = -1.0;
  cplx best_pt;
  for (cplx cand : detail::grid_seeds(image_window)) {
    double dmin = kInf;
    for (cplx rep : locus.values) dmin = std::min(dmin, std::abs(cand - rep));
    if (dmin <= clearance) continue;
    bool better = dmin > best;
    if (dmin == best) {
      better = cand.real() < best_pt.real() ||
               (cand.real() == best_pt.real() && cand.imag() < best_pt.imag());
    }
    if (better) {
      best = dmin;
      best_pt = cand;
    }
  }
  if (best < 0.0) throw NoRegularValue();
  return best_pt;
}

RootSet find_roots(const expr::Expr& f, std::complex<double> a0,
                   const locus::Window& w, const locus::LocusParams& params) {
  auto found =
      detail::find_window_roots(f, a0, w, params.dedup_tol, params.residual_tol);
  if (found.empty()) throw EmptyRootSet();
  RootSet rs;
  rs.base_value = a0;
  rs.window = w;
  for (const auto& c : found) {
    rs.roots.push_back(c.z);
    rs.residuals.push_back(c.residual);
  }
  return rs;
}

std::vector<std::complex<double>> build_loop_path(const LoopSpec& loop) {
  if (loop.radius <= 0.0)
    throw std::invalid_argument("loop radius must be positive");
  if (loop.samples_segment < 1 || loop.samples_circle < 4)
    throw std::invalid_argument("loop sampling is too coarse");
  cplx off = loop.base - loop.center;
  double dist = std::abs(off);
  if (dist <= loop.radius)
    throw std::invalid_argument("base point must lie outside the loop circle");

  cplx entry = loop.center + loop.radius * (off / dist);
  std::vector<cplx> path;
  path.reserve(static_cast<std::size_t>(2 * loop.samples_segment +
                                        loop.samples_circle + 1));
  int s = loop.samples_segment;
  for (int k = 0; k < s; ++k) {
    double t = static_cast<double>(k) / s;
    path.push_back(loop.base + t * (entry - loop.base));
  }
  path.push_back(entry);
  double theta0 = std::atan2(off.imag(), off.real());
  double turn = loop.clockwise ? -2.0 * std::numbers::pi : 2.0 * std::numbers::pi;
  int c = loop.samples_circle;
  for (int k = 1; k < c; ++k) {
    double theta = theta0 + turn * k / c;
    path.push_back(loop.center +
                   loop.radius * cplx{std::cos(theta), std::sin(theta)});
  }
  path.push_back(entry);
  for (int k = 1; k < s; ++k) {
    double t = static_cast<double>(k) / s;
    path.push_back(entry + t * (loop.base - entry));
  }
  path.push_back(loop.base);
  return path;
}

std::vector<std::complex<double>> perturb_path(
    std::vector<std::complex<double>> path,
    const std::vector<std::complex<double>>& forbidden, double margin) {
  if (margin <= 0.0) throw std::invalid_argument("margin must be positive");
  if (forbidden.empty() || path.size() < 2) return path;
  const double clear = margin / 4.0;

  for (cplx q : forbidden)
    if (std::abs(path.front() - q) <= clear || std::abs(path.back() - q) <= clear)
      throw PerturbationFailure();

  const std::vector<cplx> original = path;
  auto clears_all = [&](cplx p) {
    for (cplx q : forbidden)
      if (std::abs(p - q) <= clear) return false;
    return true;
  };

  for (int pass = 0; pass < 16; ++pass) {
    bool moved = false;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      cplx offender{};
      double worst = clear;
      bool hit = false;
      for (cplx q : forbidden) {
        double d = std::abs(path[i] - q);
        if (d <= worst) {
          worst = d;
          offender = q;
          hit = true;
        }
      }
      if (!hit) continue;
      cplx dir = path[i] - offender;
      double dn = std::abs(dir);
      if (dn > 1e-300) {
        dir /= dn;
      } else {
        // Waypoint sits on the forbidden point; deflect sideways off the
        // local path direction.
        cplx tangent = path[i + 1] - path[i - 1];
        double tn = std::abs(tangent);
        dir = tn > 1e-300 ? cplx{0, 1} * (tangent / tn) : cplx{1, 0};
      }
      bool placed = false;
      for (int rot = 0; rot < 12 && !placed; ++rot) {
        double ang = rot * std::numbers::pi / 6.0;
        cplx cand = offender +
                    0.5 * margin * dir * cplx{std::cos(ang), std::sin(ang)};
        if (clears_all(cand) && std::abs(cand - original[i]) <= margin) {
          path[i] = cand;
          placed = true;
        }
      }
      if (!placed) throw PerturbationFailure();
      moved = true;
    }
    if (!moved) return path;
  }
  // The bumps kept cascading; make sure the last state is actually clear.
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    if (!clears_all(path[i])) throw PerturbationFailure();
  return path;
}

TrackedPermutation track_path(const expr::Expr& f, const RootSet& rs,
                              const std::vector<std::complex<double>>& path,
                              const LoopSpec& loop, const TrackerParams& params,
                              const TraceSink& sink) {
  const int d = static_cast<int>(rs.roots.size());
  if (d == 0) throw EmptyRootSet();
  if (path.size() < 2)
    throw std::invalid_argument("path needs at least two waypoints");
  double base_scale = 1.0 + std::abs(rs.base_value);
  if (std::abs(path.front() - rs.base_value) > 1e-9 * base_scale ||
      std::abs(path.back() - rs.base_value) > 1e-9 * base_scale)
    throw std::invalid_argument("path must start and end at the base value");

  expr::Expr df = expr::differentiate(f);
  double total_len = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    total_len += std::abs(path[k + 1] - path[k]);
  if (total_len <= 0.0) throw std::invalid_argument("path has zero length");
  const double floor_len = 1e-12 * total_len;

  const double sep = rs.separation();
  double collision_radius = sep / 4.0;
  bool collision_shrunk = false;
  const locus::Window fence = rs.window.scaled(1.5);

  std::vector<cplx> pos = rs.roots;
  std::vector<char> alive(static_cast<std::size_t>(d), 1);
  std::vector<int> escaped;
  std::vector<cplx> trial(static_cast<std::size_t>(d));
  double walked = 0.0;

  if (sink) sink(0.0, path.front(), pos);

  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    cplx a_from = path[k];
    cplx seg = path[k + 1] - a_from;
    double seg_len = std::abs(seg);
    if (seg_len == 0.0) continue;
    double t = 0.0;
    double h = 1.0;
    while (t < 1.0) {
      if (h > 1.0 - t) h = 1.0 - t;
      cplx a_cur = a_from + t * seg;
      cplx a_next = (t + h >= 1.0) ? path[k + 1] : a_from + (t + h) * seg;
      bool ok = true;
      bool collided = false;
      for (int j = 0; j < d && ok; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        cplx x = pos[static_cast<std::size_t>(j)];
        expr::EvalResult dv = expr::evaluate(df, x);
        if (dv.pole || !finite(dv.value) ||
            std::abs(dv.value) < 1e-13 * (1.0 + std::abs(x))) {
          ok = false;
          break;
        }
        cplx predicted = x + (a_next - a_cur) / dv.value;
        ok = correct_at(f, df, a_next, predicted, params.residual_tol,
                        &trial[static_cast<std::size_t>(j)]);
      }
      if (ok) {
        for (int i = 0; i < d && !collided; ++i) {
          if (!alive[static_cast<std::size_t>(i)]) continue;
          for (int j = i + 1; j < d; ++j) {
            if (!alive[static_cast<std::size_t>(j)]) continue;
            if (std::abs(trial[static_cast<std::size_t>(i)] -
                         trial[static_cast<std::size_t>(j)]) <
                collision_radius) {
              collided = true;
              break;
            }
          }
        }
        ok = !collided;
      }
      if (ok) {
        for (int j = 0; j < d; ++j)
          if (alive[static_cast<std::size_t>(j)])
            pos[static_cast<std::size_t>(j)] = trial[static_cast<std::size_t>(j)];
        t += h;
        walked += h * seg_len;
        for (int j = 0; j < d; ++j) {
          if (alive[static_cast<std::size_t>(j)] &&
              !fence.contains(pos[static_cast<std::size_t>(j)])) {
            alive[static_cast<std::size_t>(j)] = 0;
            escaped.push_back(j);
          }
        }
        if (sink) sink(walked / total_len, a_next, pos);
        if (h < 1.0) h = std::min(1.0, 2.0 * h);
      } else {
        if (h * seg_len <= floor_len) {
          if (collided && !collision_shrunk) {
            collision_shrunk = true;
            collision_radius /= 2.0;
            continue;  // one reprieve: retry the same step with the tighter radius
          }
          if (collided)
            throw TrackingCollision("tracked branches collided mid-path");
          throw StepUnderflow();
        }
        h /= 2.0;
      }
    }
  }

  TrackedPermutation out;
  out.loop = loop;
  out.mapping.assign(static_cast<std::size_t>(d), -1);
  for (int j = 0; j < d; ++j) {
    if (!alive[static_cast<std::size_t>(j)]) continue;
    expr::EvalResult v = expr::evaluate(f, pos[static_cast<std::size_t>(j)]);
    if (!v.pole && finite(v.value))
      out.max_residual =
          std::max(out.max_residual, std::abs(v.value - rs.base_value));
  }

  std::vector<char> used(static_cast<std::size_t>(d), 0);
  for (int j = 0; j < d; ++j) {
    if (!alive[static_cast<std::size_t>(j)]) continue;
    double d1 = kInf, d2 = kInf;
    int i1 = -1;
    for (int i = 0; i < d; ++i) {
      double dd = std::abs(pos[static_cast<std::size_t>(j)] -
                           rs.roots[static_cast<std::size_t>(i)]);
      if (dd < d1) {
        d2 = d1;
        d1 = dd;
        i1 = i;
      } else if (dd < d2) {
        d2 = dd;
      }
    }
    if (d1 > sep / 4.0) {
      escaped.push_back(j);  // returned somewhere we know no branch
      continue;
    }
    if (d2 < 2.0 * d1)
      throw TrackingCollision("ambiguous match against the base roots");
    if (used[static_cast<std::size_t>(i1)])
      throw TrackingCollision("two branches returned to the same root");
    used[static_cast<std::size_t>(i1)] = 1;
    out.mapping[static_cast<std::size_t>(j)] = i1;
    out.max_match_distance = std::max(out.max_match_distance, d1);
  }
  std::sort(escaped.begin(), escaped.end());
  out.escaped = std::move(escaped);
  return out;
}

TrackedPermutation track_loop(const expr::Expr& f, const RootSet& rs,
                              const LoopSpec& loop, const TrackerParams& params,
                              const TraceSink& sink) {
  return track_path(f, rs, build_loop_path(loop), loop, params, sink);
}

MonodromyResult monodromy_generators(const expr::Expr& f, const RootSet& rs,
                                     const locus::BranchLocus& locus,
                                     const TrackerParams& params) {
  MonodromyResult res;
  const cplx a0 = rs.base_value;

  struct Item {
    int locus_index;  // -1 marks the empty-locus probe
    cplx center;
  };
  std::vector<Item> work;
  if (locus.values.empty()) {
    if (std::abs(a0) > 1e-12 * (1.0 + rs.window.half_diagonal()))
      work.push_back({-1, cplx{0.0, 0.0}});
    else
      res.failures.push_back(
          {-1, "empty locus and base point at the origin: no probe loop"});
  } else {
    for (std::size_t r = 0; r < locus.values.size(); ++r) {
      if (params.image_window && !params.image_window->contains(locus.values[r]))
        continue;
      work.push_back({static_cast<int>(r), locus.values[r]});
    }
  }

  std::vector<std::optional<TrackedPermutation>> done(work.size());
  std::vector<std::optional<GeneratorFailure>> failed(work.size());

  auto run_one = [&](std::size_t wi) {
    const Item& item = work[wi];
    double nearest_other = kInf;
    for (std::size_t s = 0; s < locus.values.size(); ++s)
      if (static_cast<int>(s) != item.locus_index)
        nearest_other =
            std::min(nearest_other, std::abs(item.center - locus.values[s]));
    double radius0 =
        std::min(nearest_other, std::abs(a0 - item.center)) / 3.0;
    if (!(radius0 > 0.0)) {
      failed[wi] = GeneratorFailure{
          item.locus_index, "base point coincides with the representative"};
      return;
    }
    std::vector<cplx> forbidden;
    for (std::size_t s = 0; s < locus.values.size(); ++s)
      if (static_cast<int>(s) != item.locus_index)
        forbidden.push_back(locus.values[s]);

    std::optional<TrackedPermutation> first_escaping;
    std::string last_error;
    for (int attempt = 0; attempt <= params.escape_retries; ++attempt) {
      LoopSpec spec;
      spec.base = a0;
      spec.center = item.center;
      spec.radius = radius0 / static_cast<double>(1 << attempt);
      spec.samples_segment = params.samples_segment;
      spec.samples_circle = params.samples_circle;
      try {
        auto path = perturb_path(build_loop_path(spec), forbidden, spec.radius);
        TrackedPermutation tp = track_path(f, rs, path, spec, params);
        if (tp.escaped.empty()) {
          done[wi] = std::move(tp);
          return;
        }
        if (!first_escaping) first_escaping = std::move(tp);
      } catch (const std::exception& e) {
        last_error = e.what();
      }
    }
    if (first_escaping)
      done[wi] = std::move(*first_escaping);
    else
      failed[wi] = GeneratorFailure{item.locus_index,
                                    last_error.empty() ? "tracking failed"
                                                       : last_error};
  };

  int jobs = std::max(1, params.jobs);
  jobs = std::min<int>(jobs, static_cast<int>(work.size()));
  if (jobs <= 1) {
    for (std::size_t wi = 0; wi < work.size(); ++wi) run_one(wi);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int tix = 0; tix < jobs; ++tix)
      pool.emplace_back([&] {
        for (std::size_t wi = next.fetch_add(1); wi < work.size();
             wi = next.fetch_add(1))
          run_one(wi);
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t wi = 0; wi < work.size(); ++wi) {
    if (done[wi]) {
      res.generators.push_back(std::move(*done[wi]));
      res.locus_indices.push_back(work[wi].locus_index);
    } else if (failed[wi]) {
      res.failures.push_back(std::move(*failed[wi]));
    }
  }
  return res;
}

}  // namespace gscope::tracker
