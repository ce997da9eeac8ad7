#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gscope/pipeline.hpp"
#include "gscope/report.hpp"
#include "gscope/svg.hpp"

namespace {

using gscope::cli::AnalysisResult;
using gscope::cli::Config;

void apply_window(gscope::locus::Window& w, const std::vector<double>& v) {
  w.re_min = v[0];
  w.re_max = v[1];
  w.im_min = v[2];
  w.im_max = v[3];
}

// The main document goes to --dump when given, otherwise to stdout.
void emit(const Config& cfg, const std::string& doc) {
  if (cfg.dump_path.empty()) {
    std::cout << doc;
    return;
  }
  std::ofstream out(cfg.dump_path, std::ios::binary);
  if (!out) throw gscope::cli::ConfigError("cannot open " + cfg.dump_path);
  out << doc;
}

void maybe_write_svg(const Config& cfg, const AnalysisResult& r) {
  if (cfg.svg_path.empty()) return;
  std::ofstream out(cfg.svg_path, std::ios::binary);
  if (!out) throw gscope::cli::ConfigError("cannot open " + cfg.svg_path);
  out << gscope::cli::render_svg(r);
}

int cmd_analyze(const Config& cfg) {
  auto r = gscope::cli::run_pipeline(cfg, gscope::cli::Stage::Full);
  emit(cfg, cfg.format == "text" ? report_text(r, "analyze")
                                 : report_json(r, "analyze"));
  maybe_write_svg(cfg, r);
  switch (r.verdict.status) {
    case gscope::verdict::Status::Solvable: return 0;
    case gscope::verdict::Status::Unsolvable: return 1;
    case gscope::verdict::Status::Inconclusive: return 2;
  }
  return 2;
}

int cmd_monodromy(const Config& cfg) {
  auto r = gscope::cli::run_pipeline(cfg, gscope::cli::Stage::Monodromy);
  emit(cfg, cfg.format == "text" ? report_text(r, "monodromy")
                                 : report_json(r, "monodromy"));
  maybe_write_svg(cfg, r);
  return 0;
}

int cmd_trace(const Config& cfg, int loop_index) {
  auto r = gscope::cli::run_pipeline(cfg, gscope::cli::Stage::Monodromy);
  if (loop_index < 0 ||
      loop_index >= static_cast<int>(r.monodromy.generators.size()))
    throw gscope::cli::IndexOutOfRange();
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!cfg.dump_path.empty()) {
    file.open(cfg.dump_path, std::ios::binary);
    if (!file) throw gscope::cli::ConfigError("cannot open " + cfg.dump_path);
    os = &file;
  }
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, " %.15g", v);
    *os << buf;
  };
  *os << "# t re(a) im(a) [re im]*\n";
  gscope::cli::trace_generator(
      r, loop_index,
      [&](double t, std::complex<double> a,
          const std::vector<std::complex<double>>& pos) {
        std::snprintf(buf, sizeof buf, "%.15g", t);
        *os << buf;
        put(a.real());
        put(a.imag());
        for (auto z : pos) {
          put(z.real());
          put(z.imag());
        }
        *os << "\n";
      });
  return 0;
}

int cmd_render(const Config& cfg) {
  auto r = gscope::cli::run_pipeline(cfg, gscope::cli::Stage::Monodromy);
  if (cfg.svg_path.empty())
    std::cout << gscope::cli::render_svg(r);
  else
    maybe_write_svg(cfg, r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical monodromy and solvability evidence for f(x) = a"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "flat key=value file; command-line flags take precedence");

  Config cfg;
  std::vector<double> domain_v, image_v;
  double grid = 4.0;
  int loop_index = 0;

  auto* grid_opt =
      app.add_option("--grid", grid, "seed grid density per unit length")
          ->check(CLI::PositiveNumber);
  app.add_option("--domain", domain_v,
                 "domain window re_min,re_max,im_min,im_max (x-plane)")
      ->delimiter(',')
      ->expected(4);
  app.add_option("--image", image_v,
                 "image window re_min,re_max,im_min,im_max (a-plane)")
      ->delimiter(',')
      ->expected(4);
  app.add_option("--tol-dedup", cfg.tols.dedup_tol,
                 "minimum distance between distinct reported points");
  app.add_option("--tol-cluster", cfg.tols.cluster_tol,
                 "critical-value clustering tolerance");
  app.add_option("--growth-steps", cfg.growth_steps,
                 "window scalings for the growth scan");
  app.add_option("--infinity-threshold", cfg.tols.infinity_threshold,
                 "distinct critical values counted as growth evidence");
  app.add_option("--closure-cap", cfg.closure_cap,
                 "group closure enumeration cap");
  app.add_option("--samples-circle", cfg.samples_circle,
                 "waypoints on each loop circle");
  app.add_option("--samples-segment", cfg.samples_segment,
                 "waypoints on each connecting segment");
  app.add_option("--format", cfg.format, "report format: json or text")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--svg", cfg.svg_path, "write an image-plane SVG here");
  app.add_option("--dump", cfg.dump_path, "write the main output here");
  app.add_option("--jobs", cfg.jobs, "concurrent loop trackings");

  auto* analyze = app.add_subcommand(
      "analyze", "full pipeline: locus, monodromy, group, verdict");
  auto* monodromy = app.add_subcommand(
      "monodromy", "stop after the loop permutations");
  auto* trace =
      app.add_subcommand("trace", "dump continuation steps of one generator");
  auto* render = app.add_subcommand("render", "emit the image-plane SVG only");
  for (auto* sub : {analyze, monodromy, trace, render}) {
    sub->add_option("expression", cfg.expression, "elementary expression in x")
        ->required();
    sub->fallthrough();
  }
  trace->add_option("loop", loop_index, "generator index to trace")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  if (!domain_v.empty()) apply_window(cfg.domain, domain_v);
  if (!image_v.empty()) apply_window(cfg.image, image_v);
  if (grid_opt->count() > 0) {
    cfg.domain.grid_density = grid;
    cfg.image.grid_density = grid;
  }

  try {
    if (*analyze) return cmd_analyze(cfg);
    if (*monodromy) return cmd_monodromy(cfg);
    if (*trace) return cmd_trace(cfg, loop_index);
    return cmd_render(cfg);
  } catch (const gscope::expr::SyntaxError& e) {
    std::cerr << "expression error at offset " << e.offset() << ": "
              << e.what() << "\n";
    return 3;
  } catch (const gscope::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  } catch (const gscope::cli::IndexOutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 5;
  }
}
