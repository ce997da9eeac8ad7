#include "gscope/report.hpp"

#include <sstream>

#include <json.hpp>

namespace gscope::cli {

namespace {

using nlohmann::ordered_json;
using cplx = std::complex<double>;

ordered_json pair_of(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json window_of(const locus::Window& w) {
  return ordered_json::array({w.re_min, w.re_max, w.im_min, w.im_max});
}

ordered_json config_of(const Config& c) {
  ordered_json j;
  j["domain"] = window_of(c.domain);
  j["image"] = window_of(c.image);
  j["grid"] = c.domain.grid_density;
  j["tol_dedup"] = c.tols.dedup_tol;
  j["tol_cluster"] = c.tols.cluster_tol;
  j["growth_steps"] = c.growth_steps;
  j["infinity_threshold"] = c.tols.infinity_threshold;
  j["closure_cap"] = c.closure_cap;
  j["samples_circle"] = c.samples_circle;
  j["samples_segment"] = c.samples_segment;
  return j;
}

ordered_json locus_of(const AnalysisResult& r) {
  ordered_json j;
  j["count"] = r.locus.values.size();
  ordered_json values = ordered_json::array();
  for (cplx v : r.locus.values) values.push_back(pair_of(v));
  j["values"] = values;
  ordered_json sizes = ordered_json::array();
  for (const auto& cluster : r.locus.members) sizes.push_back(cluster.size());
  j["cluster_sizes"] = sizes;
  j["critical_points"] = r.critical_points.size();
  return j;
}

ordered_json scan_of(const locus::ScanDiagnostics& s) {
  ordered_json j;
  j["seeds"] = s.seeds;
  j["converged"] = s.converged;
  j["dropped_nonconverged"] = s.dropped_nonconverged;
  j["dropped_out_of_window"] = s.dropped_out_of_window;
  j["dropped_pole"] = s.dropped_pole;
  j["dropped_order_overflow"] = s.dropped_order_overflow;
  j["subdivision_roots"] = s.subdivision_roots;
  return j;
}

ordered_json growth_of(const locus::GrowthEvidence& g) {
  ordered_json j;
  j["counts"] = g.counts;
  j["monotone_growth"] = g.monotone_growth;
  j["infinity_threshold"] = g.infinity_threshold;
  return j;
}

ordered_json generators_of(const AnalysisResult& r) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < r.monodromy.generators.size(); ++i) {
    const auto& g = r.monodromy.generators[i];
    ordered_json j;
    int locus_index = r.monodromy.locus_indices[i];
    j["locus_index"] = locus_index;
    j["probe"] = locus_index < 0;
    j["center"] = pair_of(g.loop.center);
    j["radius"] = g.loop.radius;
    j["mapping"] = g.mapping;
    j["cycles"] = completed_permutation(g).cycle_notation();
    j["escaped"] = g.escaped;
    j["max_match_distance"] = g.max_match_distance;
    j["max_residual"] = g.max_residual;
    arr.push_back(j);
  }
  return arr;
}

ordered_json group_of(const permgroup::GroupReport& g) {
  ordered_json j;
  j["degree"] = g.degree;
  j["generator_count"] = g.generators.size();
  j["clean_generator_count"] = g.clean_generator_count;
  j["closure_size"] = g.closure_size;
  j["closure_capped"] = g.closure_capped;
  j["orbits"] = g.orbits;
  j["transitive"] = g.transitive;
  ordered_json blocks = ordered_json::array();
  for (const auto& part : g.blocks) blocks.push_back(part);
  j["blocks"] = blocks;
  j["primitive"] = g.primitive ? ordered_json(*g.primitive) : ordered_json();
  j["solvable"] = g.solvable ? ordered_json(*g.solvable) : ordered_json();
  j["derived_length"] =
      g.derived_length ? ordered_json(*g.derived_length) : ordered_json();
  j["derived_sizes"] = g.derived_sizes;
  j["has_finite_support_gen"] = g.has_finite_support_gen;
  j["min_support"] = g.min_support;
  j["notes"] = g.notes;
  return j;
}

ordered_json verdict_of(const verdict::Verdict& v) {
  ordered_json j;
  j["status"] = verdict::to_string(v.status);
  j["rule"] = verdict::to_string(v.rule);
  j["confidence"] = verdict::to_string(v.confidence);
  ordered_json rules = ordered_json::array();
  for (const auto& t : v.considered) {
    ordered_json rj;
    rj["rule"] = verdict::to_string(t.rule);
    rj["fired"] = t.fired;
    rj["reason"] = t.reason;
    rules.push_back(rj);
  }
  j["rules"] = rules;
  return j;
}

std::string fmt(cplx z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

std::string opt_str(const std::optional<bool>& v) {
  if (!v) return "undecided";
  return *v ? "yes" : "no";
}

}  // namespace

std::string report_json(const AnalysisResult& r, const std::string& command) {
  const bool full = command == "analyze";
  ordered_json doc;
  doc["schema"] = "galois-scope/1";
  doc["command"] = command;
  doc["expression"] = r.config.expression;
  doc["config"] = config_of(r.config);
  doc["tower_depth"] = r.tower_depth;
  doc["locus"] = locus_of(r);
  doc["scan"] = scan_of(r.scan);
  doc["growth"] = growth_of(r.growth);
  if (r.roots) {
    doc["base_point"] = pair_of(r.base_point);
    ordered_json roots = ordered_json::array();
    for (cplx z : r.roots->roots) roots.push_back(pair_of(z));
    doc["roots"] = roots;
    doc["separation"] = r.roots->separation();
  } else {
    doc["base_point"] = ordered_json();
    doc["roots"] = ordered_json::array();
  }
  doc["generators"] = generators_of(r);
  ordered_json failures = ordered_json::array();
  for (const auto& f : r.monodromy.failures) {
    ordered_json fj;
    fj["locus_index"] = f.locus_index;
    fj["message"] = f.message;
    failures.push_back(fj);
  }
  doc["generator_failures"] = failures;
  if (full) {
    doc["group"] = group_of(r.group);
    doc["root_counts"] = r.root_counts;
    doc["root_counts_increasing"] = r.root_counts_increasing;
    doc["verdict"] = verdict_of(r.verdict);
  }
  doc["warnings"] = r.warnings;
  return doc.dump(2) + "\n";
}

std::string report_text(const AnalysisResult& r, const std::string& command) {
  const bool full = command == "analyze";
  std::ostringstream os;
  os << "expression: " << r.config.expression << "\n";
  os << "tower depth: " << r.tower_depth << "\n";
  os << "critical points: " << r.critical_points.size()
     << ", distinct critical values: " << r.locus.values.size() << "\n";
  for (std::size_t i = 0; i < r.locus.values.size(); ++i)
    os << "  value " << i << ": " << fmt(r.locus.values[i]) << " ("
       << r.locus.members[i].size() << " point(s))\n";
  os << "locus growth:";
  for (int c : r.growth.counts) os << " " << c;
  os << (r.growth.monotone_growth ? "  (monotone past threshold)" : "") << "\n";
  if (r.roots) {
    os << "base point: " << fmt(r.base_point) << "\n";
    os << "roots: " << r.roots->roots.size()
       << ", separation " << r.roots->separation() << "\n";
  } else {
    os << "base point: none with a nonempty fiber\n";
  }
  for (std::size_t i = 0; i < r.monodromy.generators.size(); ++i) {
    const auto& g = r.monodromy.generators[i];
    int li = r.monodromy.locus_indices[i];
    os << "generator " << i << ": "
       << completed_permutation(g).cycle_notation();
    if (li < 0)
      os << "  [probe loop around " << fmt(g.loop.center) << "]";
    else
      os << "  [loop " << li << " around " << fmt(g.loop.center) << "]";
    if (!g.escaped.empty()) {
      os << "  escaped:";
      for (int e : g.escaped) os << " " << e;
    }
    os << "\n";
  }
  for (const auto& f : r.monodromy.failures)
    os << "failed loop " << f.locus_index << ": " << f.message << "\n";
  if (full) {
    os << "group: degree " << r.group.degree << ", closure "
       << r.group.closure_size << (r.group.closure_capped ? " (capped)" : "")
       << "\n";
    os << "  transitive: " << (r.group.transitive ? "yes" : "no")
       << ", primitive: " << opt_str(r.group.primitive)
       << ", solvable: " << opt_str(r.group.solvable) << "\n";
    if (!r.group.derived_sizes.empty()) {
      os << "  derived series sizes:";
      for (long long s : r.group.derived_sizes) os << " " << s;
      os << "\n";
    }
    for (const auto& n : r.group.notes) os << "  note: " << n << "\n";
    os << "root counts:";
    for (long long c : r.root_counts) os << " " << c;
    os << (r.root_counts_increasing ? "  (increasing)" : "") << "\n";
    os << "verdict: " << verdict::to_string(r.verdict.status) << " ["
       << verdict::to_string(r.verdict.rule) << ", "
       << verdict::to_string(r.verdict.confidence) << "]\n";
    for (const auto& t : r.verdict.considered)
      os << "  " << verdict::to_string(t.rule)
         << (t.fired ? " fired: " : " skipped: ") << t.reason << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace gscope::cli
