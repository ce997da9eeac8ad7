// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Library checks run in-process; CLI checks run the real binary.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "gscope/expr.hpp"
#include "gscope/locus.hpp"
#include "gscope/permgroup.hpp"
#include "gscope/pipeline.hpp"
#include "gscope/tracker.hpp"

using namespace gscope;
using json = nlohmann::json;
using cplx = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void req(bool cond, const std::string& msg) {
  if (!cond) throw Failure(msg);
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  double seconds = 0.0;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(GSCOPE_CLI) + " " + args + " 2>/dev/null";
  auto t0 = std::chrono::steady_clock::now();
  FILE* p = popen(cmd.c_str(), "r");
  req(p != nullptr, "popen failed");
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  return r;
}

json parse_json(const RunResult& r) {
  req(!r.out.empty(), "empty CLI output");
  return json::parse(r.out);
}

std::vector<int> cycle_type_of_mapping(const std::vector<int>& mapping) {
  std::vector<int> type;
  std::vector<char> seen(mapping.size(), 0);
  for (std::size_t s = 0; s < mapping.size(); ++s) {
    if (seen[s]) continue;
    int len = 0;
    std::size_t j = s;
    while (!seen[j]) {
      seen[j] = 1;
      ++len;
      req(mapping[j] >= 0, "mapping has escaped entries");
      j = static_cast<std::size_t>(mapping[j]);
    }
    if (len > 1) type.push_back(len);
  }
  std::sort(type.begin(), type.end());
  return type;
}

// ---- criterion bodies -----------------------------------------------------

void c1_cycle_length_law() {
  for (int m = 1; m <= 4; ++m) {
    std::string expr = "x^" + std::to_string(m + 1);
    auto r = run_cli("monodromy '" + expr + "'");
    req(r.exit_code == 0, expr + ": exit " + std::to_string(r.exit_code));
    req(r.seconds < 1.0, expr + ": took " + std::to_string(r.seconds) + "s");
    auto doc = parse_json(r);
    req(doc["generators"].size() == 1,
        expr + ": expected one generator, got " +
            std::to_string(doc["generators"].size()));
    const auto& g = doc["generators"][0];
    req(g["escaped"].empty(), expr + ": generator has escapes");
    auto type = cycle_type_of_mapping(g["mapping"].get<std::vector<int>>());
    req(type == std::vector<int>{m + 1},
        expr + ": not a single " + std::to_string(m + 1) + "-cycle");
    req(g["max_match_distance"].get<double>() < 1e-8,
        expr + ": match distance " +
            std::to_string(g["max_match_distance"].get<double>()));
  }
}

void c2_exp_shift_generator() {
  auto t0 = std::chrono::steady_clock::now();
  expr::Expr f = expr::parse_expression("exp(x)");
  locus::Window w{-1.0, 1.0, -15.0, 15.0, 4.0};
  auto lc = locus::branch_locus(locus::find_critical_points(f, w), 1e-6);
  req(lc.values.empty(), "exp should have an empty branch locus");
  auto rs = tracker::find_roots(f, cplx{1.0, 0.0}, w);
  req(rs.roots.size() == 5, "expected the five roots 2*pi*i*k, |k| <= 2");
  auto mono = tracker::monodromy_generators(f, rs, lc);
  req(mono.generators.size() == 1, "expected a single probe generator");
  const auto& g = mono.generators[0];
  req(g.escaped.size() == 1,
      "expected exactly one escaped index, got " +
          std::to_string(g.escaped.size()));
  for (std::size_t j = 0; j < rs.roots.size(); ++j) {
    double k = std::round(rs.roots[j].imag() / kTwoPi);
    req(std::abs(rs.roots[j] - cplx{0.0, kTwoPi * k}) < 1e-9,
        "root is not at a lattice point 2*pi*i*k");
    if (g.mapping[j] < 0) continue;
    cplx target = rs.roots[j] + cplx{0.0, kTwoPi};
    req(std::abs(rs.roots[static_cast<std::size_t>(g.mapping[j])] - target) <
            1e-8,
        "non-escaped root did not shift by 2*pi*i");
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  req(secs < 1.0, "took " + std::to_string(secs) + "s");
}

void c3_flagship_unsolvable() {
  auto r = run_cli("analyze 'exp(x)+x'");
  req(r.exit_code == 1, "exit " + std::to_string(r.exit_code));
  req(r.seconds < 30.0, "took " + std::to_string(r.seconds) + "s");
  auto doc = parse_json(r);
  req(doc["verdict"]["rule"] == "R-INF",
      "rule " + doc["verdict"]["rule"].get<std::string>());
  auto counts = doc["growth"]["counts"].get<std::vector<int>>();
  req(counts.size() >= 3, "fewer than 3 growth windows");
  for (std::size_t i = 1; i < counts.size(); ++i)
    req(counts[i] > counts[i - 1], "counts not strictly increasing");
  req(counts.back() >= 8, "final count below 8");
  req(!doc["generators"].empty(), "no generators");
  for (const auto& g : doc["generators"]) {
    req(g["escaped"].empty(), "generator has escapes");
    auto type = cycle_type_of_mapping(g["mapping"].get<std::vector<int>>());
    req(type == std::vector<int>{2}, "generator is not a clean 2-cycle");
  }
}

void c4_finite_unsolvable() {
  auto r = run_cli("analyze 'x^5-5*x'");
  req(r.exit_code == 1, "exit " + std::to_string(r.exit_code));
  req(r.seconds < 5.0, "took " + std::to_string(r.seconds) + "s");
  auto doc = parse_json(r);
  req(doc["verdict"]["rule"] == "R-FIN-UNSOLVABLE",
      "rule " + doc["verdict"]["rule"].get<std::string>());
  req(doc["group"]["closure_size"] == 120,
      "closure " + doc["group"]["closure_size"].dump());
  req(doc["group"]["derived_sizes"] == json::array({120, 60, 60}),
      "derived sizes " + doc["group"]["derived_sizes"].dump());
  req(doc["generators"].size() == 4, "expected four generators");
  for (const auto& g : doc["generators"]) {
    req(g["escaped"].empty(), "generator has escapes");
    auto type = cycle_type_of_mapping(g["mapping"].get<std::vector<int>>());
    req(type == std::vector<int>{2}, "generator is not a transposition");
  }
}

void c5_finite_solvable() {
  auto square = run_cli("analyze 'x^2'");
  req(square.exit_code == 0, "x^2 exit " + std::to_string(square.exit_code));
  auto cubic = run_cli("analyze 'x^3-3*x'");
  req(cubic.exit_code == 0,
      "x^3-3*x exit " + std::to_string(cubic.exit_code));
  auto doc = parse_json(cubic);
  req(doc["group"]["closure_size"] == 6,
      "cubic closure " + doc["group"]["closure_size"].dump());
  req(doc["group"]["derived_length"] == 2,
      "cubic derived_length " + doc["group"]["derived_length"].dump());
}

void c6_imprimitivity_witness() {
  auto r = run_cli("analyze '(exp(x)-1)^2'");
  req(r.seconds < 10.0, "took " + std::to_string(r.seconds) + "s");
  auto doc = parse_json(r);
  req(doc["locus"]["count"] == 1,
      "locus count " + doc["locus"]["count"].dump());
  auto v = doc["locus"]["values"][0].get<std::vector<double>>();
  req(std::hypot(v[0], v[1]) < 1e-9, "locus value is not at 0");

  // R-INF must not fire; its growth signal is flat.
  req(doc["verdict"]["rules"][0]["rule"] == "R-INF", "rule order changed");
  req(doc["verdict"]["rules"][0]["fired"] == false, "R-INF fired");
  auto counts = doc["growth"]["counts"].get<std::vector<int>>();
  for (int c : counts)
    req(c == counts.front(), "growth counts are not constant");

  // A nontrivial system of 2-blocks, each pairing roots whose continuation
  // collapses into the same critical preimage 2*pi*i*k.
  auto roots = doc["roots"].get<std::vector<std::vector<double>>>();
  req(roots.size() == 10, "expected ten roots");
  bool found = false;
  for (const auto& partition : doc["group"]["blocks"]) {
    if (partition.size() != 5) continue;
    bool pairs_match = true;
    for (const auto& block : partition) {
      if (block.size() != 2) {
        pairs_match = false;
        break;
      }
      int a = block[0].get<int>(), b = block[1].get<int>();
      double ka = std::round(roots[a][1] / kTwoPi);
      double kb = std::round(roots[b][1] / kTwoPi);
      if (ka != kb) {
        pairs_match = false;
        break;
      }
    }
    if (pairs_match) found = true;
  }
  req(found, "no 2-block system pairing roots over a shared critical point");
}

void c7_homotopy_identity() {
  const char* exprs[] = {"x^2", "x^3-3*x", "x^5-5*x", "exp(x)+x",
                         "(exp(x)-1)^2"};
  for (const char* text : exprs) {
    expr::Expr f = expr::parse_expression(text);
    locus::Window domain{-8.0, 8.0, -16.0, 16.0, 4.0};
    locus::Window image{-8.0, 8.0, -8.0, 8.0, 4.0};
    auto lc = locus::branch_locus(locus::find_critical_points(f, domain), 1e-6);
    cplx base = tracker::choose_base_point(lc, image);
    auto rs = tracker::find_roots(f, base, domain);
    double d = domain.half_diagonal() / 8.0;
    for (cplx rep : lc.values) d = std::min(d, std::abs(base - rep));
    tracker::LoopSpec loop;
    loop.base = base;
    loop.center = base + cplx{d / 3.0, 0.0};
    loop.radius = d / 6.0;
    auto tp = tracker::track_loop(f, rs, loop);
    req(tp.escaped.empty(), std::string(text) + ": loop shed a root");
    for (std::size_t j = 0; j < tp.mapping.size(); ++j)
      req(tp.mapping[j] == static_cast<int>(j),
          std::string(text) + ": loop permuted the roots");
    req(tp.max_match_distance < 1e-8,
        std::string(text) + ": displacement " +
            std::to_string(tp.max_match_distance));
  }
}

void c8_transitivity() {
  struct Case {
    const char* text;
    std::size_t degree;
  } cases[] = {{"x^2", 2}, {"x^3-3*x", 3}, {"x^5-5*x", 5}};
  for (const auto& c : cases) {
    cli::Config cfg;
    cfg.expression = c.text;
    auto r = cli::run_pipeline(cfg, cli::Stage::Full);
    req(r.roots && r.roots->roots.size() == c.degree,
        std::string(c.text) + ": wrong root count");
    for (const auto& g : r.monodromy.generators)
      req(g.escaped.empty(), std::string(c.text) + ": escape present");
    req(r.group.orbits.size() == 1,
        std::string(c.text) + ": " + std::to_string(r.group.orbits.size()) +
            " orbits");
    req(r.group.transitive, std::string(c.text) + ": not transitive");
  }
}

void c9_base_point_independence() {
  expr::Expr f = expr::parse_expression("x^5-5*x");
  locus::Window domain{-8.0, 8.0, -16.0, 16.0, 4.0};
  auto lc = locus::branch_locus(locus::find_critical_points(f, domain), 1e-6);
  req(lc.values.size() == 4, "quintic should have four critical values");

  auto types_at = [&](cplx base) {
    auto rs = tracker::find_roots(f, base, domain);
    auto mono = tracker::monodromy_generators(f, rs, lc);
    req(mono.failures.empty(), "generator failure");
    std::vector<std::vector<int>> types;
    for (const auto& g : mono.generators) {
      req(g.escaped.empty(), "escape present");
      types.push_back(cycle_type_of_mapping(g.mapping));
    }
    std::sort(types.begin(), types.end());
    return types;
  };

  cplx first{-8.0, -8.0};  // the default choice
  cplx second{0.0, 0.0};   // also regular: critical values sit at |a| = 4
  req(types_at(first) == types_at(second),
      "cycle-type multisets differ between base points");
}

void c10_determinism() {
  auto a1 = run_cli("analyze 'x^5-5*x'");
  auto a2 = run_cli("analyze 'x^5-5*x'");
  req(a1.out == a2.out, "repeated runs differ");
  auto p1 = run_cli("analyze 'x^5-5*x' --jobs 4");
  auto p2 = run_cli("analyze 'x^5-5*x' --jobs 4");
  req(p1.out == p2.out, "repeated parallel runs differ");
  req(a1.out == p1.out, "parallel run differs from serial run");
  req(!a1.out.empty() && a1.out.front() == '{', "output is not JSON");
}

void c11_derivative_correctness() {
  // Frozen-seed random expression trees; central differences at two step
  // sizes, skipping stencils that straddle poles or branch cuts.
  std::mt19937 rng(402653189u);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> small_exp(0, 3);

  std::function<expr::Expr(int)> gen = [&](int depth) -> expr::Expr {
    int k = depth <= 0 ? pick(rng) % 2 : pick(rng);
    switch (k) {
      case 0: return expr::Expr::variable();
      case 1: return expr::Expr::constant({u(rng), u(rng)});
      case 2: return expr::Expr::add(gen(depth - 1), gen(depth - 1));
      case 3: return expr::Expr::sub(gen(depth - 1), gen(depth - 1));
      case 4: return expr::Expr::mul(gen(depth - 1), gen(depth - 1));
      case 5: return expr::Expr::div(gen(depth - 1), gen(depth - 1));
      case 6: return expr::Expr::exp_of(gen(depth - 1));
      case 7: return expr::Expr::log_of(gen(depth - 1));
      default: {
        static const long long exps[] = {-3, -2, 2, 3};
        return expr::Expr::pow_int(gen(depth - 1), exps[small_exp(rng)]);
      }
    }
  };

  auto fd = [&](const expr::Expr& f, cplx x, double h, bool& ok) -> cplx {
    auto p = expr::evaluate(f, x + cplx{h, 0.0});
    auto m = expr::evaluate(f, x - cplx{h, 0.0});
    ok = !p.pole && !m.pole && std::isfinite(std::abs(p.value)) &&
         std::isfinite(std::abs(m.value)) && std::abs(p.value) < 1e8 &&
         std::abs(m.value) < 1e8;
    return ok ? (p.value - m.value) / cplx{2.0 * h, 0.0} : cplx{};
  };

  int checked = 0;
  for (int t = 0; t < 600 && checked < 1200; ++t) {
    expr::Expr f = gen(6);
    expr::Expr df = expr::differentiate(f);
    for (int s = 0; s < 10; ++s) {
      cplx x{u(rng), u(rng)};
      bool ok1 = false, ok2 = false;
      cplx d1 = fd(f, x, 1e-6, ok1);
      cplx d2 = fd(f, x, 5e-7, ok2);
      if (!ok1 || !ok2 || std::abs(d1 - d2) > 1e-4 * (1.0 + std::abs(d1)))
        continue;  // stencil hit a pole or branch cut
      auto sym = expr::evaluate(df, x);
      if (sym.pole || !std::isfinite(std::abs(sym.value)) ||
          std::abs(sym.value) > 1e8)
        continue;
      ++checked;
      req(std::abs(sym.value - d2) < 1e-5 * (1.0 + std::abs(sym.value)),
          "symbolic and finite-difference derivatives disagree for f = " +
              expr::to_string(f));
    }
  }
  req(checked >= 1000,
      "only " + std::to_string(checked) + " usable samples, need 1000");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<void()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "cycle-length law for x^(m+1)", c1_cycle_length_law},
      {2, "exp generator shifts the root lattice", c2_exp_shift_generator},
      {3, "exp(x)+x unsolvable via R-INF", c3_flagship_unsolvable},
      {4, "x^5-5*x unsolvable via R-FIN-UNSOLVABLE", c4_finite_unsolvable},
      {5, "x^2 and x^3-3*x solvable", c5_finite_solvable},
      {6, "(exp(x)-1)^2 imprimitivity witness", c6_imprimitivity_witness},
      {7, "null loop is the identity on all five", c7_homotopy_identity},
      {8, "monodromy acts transitively", c8_transitivity},
      {9, "cycle types independent of base point", c9_base_point_independence},
      {10, "byte-identical reports, serial and parallel", c10_determinism},
      {11, "derivative matches finite differences", c11_derivative_correctness},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    try {
      c.run();
    } catch (const std::exception& e) {
      detail = e.what();
      ++failures;
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] %2d %-45s (%5.2fs)%s%s\n",
                detail.empty() ? "PASS" : "FAIL", c.id, c.label, secs,
                detail.empty() ? "" : " ", detail.c_str());
  }
  if (failures > 0) std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
