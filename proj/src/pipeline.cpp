#include "gscope/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "rootfind.hpp"

namespace gscope::cli {

namespace {

using cplx = std::complex<double>;

std::string describe(cplx z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

void check_window(const locus::Window& w, const char* name) {
  if (!(w.re_min < w.re_max) || !(w.im_min < w.im_max))
    throw ConfigError(std::string(name) + " window is empty");
  if (!(w.grid_density > 0.0))
    throw ConfigError(std::string(name) + " grid density must be positive");
}

// Base-point candidates in preference order. The head of the list is exactly
// what choose_base_point returns; the tail provides fallbacks for base
// points whose fiber turns out to be empty (for instance the window center
// convention landing on an omitted value).
std::vector<cplx> base_candidates(const locus::BranchLocus& lc,
                                  const locus::Window& image) {
  std::vector<cplx> grid = detail::grid_seeds(image);
  std::vector<cplx> out;
  if (lc.values.empty()) {
    cplx center = image.center();
    out.push_back(center);
    std::sort(grid.begin(), grid.end(), [&](cplx a, cplx b) {
      double da = std::abs(a - center), db = std::abs(b - center);
      if (da != db) return da < db;
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    for (cplx c : grid)
      if (c != center) out.push_back(c);
    return out;
  }
  double clearance = 1e-9 * (1.0 + image.half_diagonal());
  std::vector<std::pair<double, cplx>> ranked;
  for (cplx c : grid) {
    double dmin = 1e300;
    for (cplx rep : lc.values) dmin = std::min(dmin, std::abs(c - rep));
    if (dmin > clearance) ranked.push_back({dmin, c});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              if (a.second.real() != b.second.real())
                return a.second.real() < b.second.real();
              return a.second.imag() < b.second.imag();
            });
  for (const auto& [dmin, c] : ranked) out.push_back(c);
  return out;
}

}  // namespace

void Config::validate() const {
  check_window(domain, "domain");
  check_window(image, "image");
  if (!(tols.dedup_tol > 0.0) || !(tols.residual_tol > 0.0) ||
      !(tols.order_tol > 0.0) || !(tols.pole_tol > 0.0) ||
      !(tols.cluster_tol > 0.0))
    throw ConfigError("tolerances must be positive");
  if (growth_steps < 2) throw ConfigError("growth-steps must be at least 2");
  if (closure_cap < 1) throw ConfigError("closure-cap must be at least 1");
  if (samples_circle < 4) throw ConfigError("samples-circle must be at least 4");
  if (samples_segment < 1) throw ConfigError("samples-segment must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (format != "json" && format != "text")
    throw ConfigError("format must be json or text");
}

permgroup::Perm completed_permutation(const tracker::TrackedPermutation& tp) {
  std::vector<int> images = tp.mapping;
  std::vector<char> claimed(images.size(), 0);
  for (int v : images)
    if (v >= 0) claimed[static_cast<std::size_t>(v)] = 1;
  std::vector<int> unclaimed;
  for (std::size_t i = 0; i < images.size(); ++i)
    if (!claimed[i]) unclaimed.push_back(static_cast<int>(i));
  std::size_t next = 0;
  for (int& v : images)
    if (v < 0) v = unclaimed[next++];
  return permgroup::Perm(std::move(images));
}

AnalysisResult run_pipeline(const Config& cfg, Stage stage) {
  cfg.validate();
  AnalysisResult r;
  r.config = cfg;
  r.function = expr::parse_expression(cfg.expression);
  r.tower_depth = expr::tower_depth(r.function);

  r.critical_points =
      locus::find_critical_points(r.function, cfg.domain, cfg.tols, &r.scan);
  r.locus = locus::branch_locus(r.critical_points, cfg.tols.cluster_tol);
  r.growth = locus::infinite_locus_evidence(r.function, cfg.domain,
                                            cfg.growth_steps, cfg.tols);
  for (const auto& w : r.scan.warnings) r.warnings.push_back(w);
  for (const auto& w : r.locus.warnings) r.warnings.push_back(w);
  if (stage == Stage::Locus) return r;

  // Base point and its fiber, with fallback candidates when a fiber is
  // empty. Capped at a fixed number of attempts to keep failure cheap.
  auto candidates = base_candidates(r.locus, cfg.image);
  int tried = 0;
  for (cplx c : candidates) {
    if (tried >= 25) break;
    ++tried;
    try {
      auto rs = tracker::find_roots(r.function, c, cfg.domain, cfg.tols);
      r.base_point = c;
      r.roots = std::move(rs);
      break;
    } catch (const tracker::EmptyRootSet&) {
      continue;
    }
  }
  if (!r.roots) {
    r.warnings.push_back(
        "no roots of f(x) = a0 in the domain window for any base-point "
        "candidate");
  } else {
    if (tried > 1)
      r.warnings.push_back("base point moved to " + describe(r.base_point) +
                           " after " + std::to_string(tried - 1) +
                           " empty fiber(s)");
    tracker::TrackerParams tp;
    tp.samples_segment = cfg.samples_segment;
    tp.samples_circle = cfg.samples_circle;
    tp.jobs = cfg.jobs;
    tp.image_window = cfg.image;
    r.monodromy =
        tracker::monodromy_generators(r.function, *r.roots, r.locus, tp);
    for (const auto& fail : r.monodromy.failures)
      r.warnings.push_back("loop " + std::to_string(fail.locus_index) +
                           ": " + fail.message);
  }
  if (stage == Stage::Monodromy) return r;

  std::vector<permgroup::Perm> gens;
  std::vector<std::vector<int>> escapes;
  int tainted = 0;
  for (const auto& gen : r.monodromy.generators) {
    gens.push_back(completed_permutation(gen));
    escapes.push_back(gen.escaped);
    if (!gen.escaped.empty()) ++tainted;
  }
  r.group = permgroup::build_group_report(gens, escapes, cfg.closure_cap);
  if (gens.empty() && r.roots)
    r.group.degree = static_cast<int>(r.roots->roots.size());

  if (r.roots) {
    int prev = -1;
    bool increasing = true;
    for (int s = 1; s <= cfg.growth_steps; ++s) {
      auto found = detail::find_window_roots(
          r.function, r.base_point, cfg.domain.scaled(s), cfg.tols.dedup_tol,
          cfg.tols.residual_tol);
      int count = static_cast<int>(found.size());
      r.root_counts.push_back(count);
      if (prev >= 0 && count <= prev) increasing = false;
      prev = count;
    }
    r.root_counts_increasing =
        increasing && r.root_counts.size() >= 2;
  }

  verdict::EvidenceBundle eb;
  eb.locus = r.locus;
  eb.growth = r.growth;
  eb.group = r.group;
  eb.root_counts = r.root_counts;
  eb.root_counts_increasing = r.root_counts_increasing;
  eb.escaped_generator_count = tainted;
  eb.tower_depth = r.tower_depth;
  r.verdict = verdict::decide(eb);
  return r;
}

void trace_generator(const AnalysisResult& r, int generator_index,
                     const tracker::TraceSink& sink) {
  if (!r.roots || generator_index < 0 ||
      generator_index >= static_cast<int>(r.monodromy.generators.size()))
    throw IndexOutOfRange();
  const auto& gen =
      r.monodromy.generators[static_cast<std::size_t>(generator_index)];
  int locus_index =
      r.monodromy.locus_indices[static_cast<std::size_t>(generator_index)];
  std::vector<cplx> forbidden;
  for (std::size_t s = 0; s < r.locus.values.size(); ++s)
    if (static_cast<int>(s) != locus_index)
      forbidden.push_back(r.locus.values[s]);
  auto path = tracker::perturb_path(tracker::build_loop_path(gen.loop),
                                    forbidden, gen.loop.radius);
  tracker::TrackerParams params;
  params.samples_segment = gen.loop.samples_segment;
  params.samples_circle = gen.loop.samples_circle;
  tracker::track_path(r.function, *r.roots, path, gen.loop, params, sink);
}

}  // namespace gscope::cli
