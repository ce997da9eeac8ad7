#include "gscope/permgroup.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

namespace gscope::permgroup {

namespace {

int common_degree(const std::vector<Perm>& gens) {
  if (gens.empty()) return 0;
  int d = gens.front().degree();
  for (const Perm& g : gens)
    if (g.degree() != d) throw DegreeMismatch();
  return d;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;  // smaller index wins: canonical
    return true;
  }
};

std::vector<std::vector<int>> classes_of(UnionFind& uf, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> where(static_cast<std::size_t>(degree), -1);
  for (int i = 0; i < degree; ++i) {
    int r = uf.find(i);
    if (where[static_cast<std::size_t>(r)] < 0) {
      where[static_cast<std::size_t>(r)] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(where[static_cast<std::size_t>(r)])].push_back(i);
  }
  return out;  // classes appear by smallest member; members ascend
}

std::vector<std::vector<int>> orbit_classes(
    int degree, const std::vector<std::pair<int, int>>& edges) {
  UnionFind uf(degree);
  for (auto [a, b] : edges) uf.unite(a, b);
  return classes_of(uf, degree);
}

bool is_trivial_partition(const Partition& p, int degree) {
  return p.size() == 1 || p.size() == static_cast<std::size_t>(degree);
}

// Generators of the derived subgroup: commutators of the given generators,
// closed under conjugation by them (normal closure). capped is set when the
// generating set itself outgrows the cap.
std::vector<Perm> derived_generators(const std::vector<Perm>& gens,
                                     long long cap, bool* capped) {
  *capped = false;
  std::set<Perm> out;
  std::queue<Perm> frontier;
  auto push = [&](const Perm& p) {
    if (p.is_identity()) return true;
    if (!out.insert(p).second) return true;
    if (static_cast<long long>(out.size()) > cap) return false;
    frontier.push(p);
    return true;
  };
  for (const Perm& a : gens)
    for (const Perm& b : gens) {
      Perm comm = a.inverse().compose(b.inverse()).compose(a).compose(b);
      if (!push(comm)) {
        *capped = true;
        return {};
      }
    }
  while (!frontier.empty()) {
    Perm s = frontier.front();
    frontier.pop();
    for (const Perm& g : gens) {
      Perm conj = g.inverse().compose(s).compose(g);
      if (!push(conj)) {
        *capped = true;
        return {};
      }
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace

Perm::Perm(std::vector<int> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (int v : images_) {
    if (v < 0 || v >= static_cast<int>(images_.size()) ||
        seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("images do not form a permutation");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Perm Perm::identity(int degree) {
  std::vector<int> im(static_cast<std::size_t>(degree));
  std::iota(im.begin(), im.end(), 0);
  return Perm(std::move(im));
}

Perm Perm::from_cycles(int degree,
                       const std::vector<std::vector<int>>& cycles) {
  std::vector<int> im(static_cast<std::size_t>(degree));
  std::iota(im.begin(), im.end(), 0);
  std::vector<bool> used(static_cast<std::size_t>(degree), false);
  for (const auto& c : cycles) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      int from = c[k];
      int to = c[(k + 1) % c.size()];
      if (from < 0 || from >= degree || used[static_cast<std::size_t>(from)])
        throw std::invalid_argument("cycles are not disjoint and in range");
      used[static_cast<std::size_t>(from)] = true;
      im[static_cast<std::size_t>(from)] = to;
    }
  }
  return Perm(std::move(im));
}

Perm Perm::compose(const Perm& other) const {
  if (degree() != other.degree()) throw DegreeMismatch();
  std::vector<int> im(images_.size());
  for (std::size_t i = 0; i < im.size(); ++i)
    im[i] = images_[static_cast<std::size_t>(other.images_[i])];
  return Perm(std::move(im));
}

Perm Perm::inverse() const {
  std::vector<int> im(images_.size());
  for (std::size_t i = 0; i < im.size(); ++i)
    im[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
  return Perm(std::move(im));
}

bool Perm::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i)) return false;
  return true;
}

int Perm::support_size() const {
  int n = 0;
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i)) ++n;
  return n;
}

std::vector<std::vector<int>> Perm::cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(images_.size(), false);
  for (int start = 0; start < degree(); ++start) {
    if (seen[static_cast<std::size_t>(start)] || (*this)(start) == start)
      continue;
    std::vector<int> cyc;
    int cur = start;
    do {
      seen[static_cast<std::size_t>(cur)] = true;
      cyc.push_back(cur);
      cur = (*this)(cur);
    } while (cur != start);
    out.push_back(std::move(cyc));
  }
  return out;
}

std::string Perm::cycle_notation() const {
  auto cs = cycles();
  if (cs.empty()) return "()";
  std::string s;
  for (const auto& c : cs) {
    s += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(c[i]);
    }
    s += ')';
  }
  return s;
}

std::vector<int> Perm::cycle_type() const {
  std::vector<int> t;
  for (const auto& c : cycles()) t.push_back(static_cast<int>(c.size()));
  std::sort(t.begin(), t.end());
  return t;
}

ClosureResult closure(const std::vector<Perm>& gens, long long cap) {
  int degree = common_degree(gens);
  ClosureResult res;
  if (gens.empty()) {
    res.size = 1;
    return res;  // trivial group; no degree to build an identity on
  }
  std::set<Perm> seen;
  std::queue<Perm> frontier;
  Perm id = Perm::identity(degree);
  seen.insert(id);
  frontier.push(id);
  while (!frontier.empty()) {
    Perm cur = frontier.front();
    frontier.pop();
    for (const Perm& g : gens) {
      Perm next = g.compose(cur);
      if (seen.insert(next).second) {
        if (static_cast<long long>(seen.size()) > cap) {
          res.size = static_cast<long long>(seen.size());
          res.capped = true;
          return res;
        }
        frontier.push(next);
      }
    }
  }
  res.size = static_cast<long long>(seen.size());
  res.elements.assign(seen.begin(), seen.end());
  return res;
}

std::vector<std::vector<int>> orbits(const std::vector<Perm>& gens,
                                     int degree_hint) {
  int degree = gens.empty() ? degree_hint : common_degree(gens);
  std::vector<std::pair<int, int>> edges;
  for (const Perm& g : gens)
    for (int i = 0; i < degree; ++i) edges.emplace_back(i, g(i));
  return orbit_classes(degree, edges);
}

std::vector<Partition> block_systems(const std::vector<Perm>& gens) {
  int degree = common_degree(gens);
  if (degree == 0) throw NotTransitive();
  if (orbits(gens).size() != 1) throw NotTransitive();

  std::set<Partition> distinct;
  for (int beta = 1; beta < degree; ++beta) {
    UnionFind uf(degree);
    uf.unite(0, beta);
    // Refine to the finest congruence fusing 0 and beta: whenever two points
    // share a class, their images under every generator must as well.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Perm& g : gens)
        for (int i = 0; i < degree; ++i)
          for (int j = i + 1; j < degree; ++j)
            if (uf.find(i) == uf.find(j) && uf.unite(g(i), g(j)))
              changed = true;
    }
    Partition p = classes_of(uf, degree);
    if (!is_trivial_partition(p, degree)) distinct.insert(std::move(p));
  }

  std::vector<Partition> out;
  Partition singletons;
  for (int i = 0; i < degree; ++i) singletons.push_back({i});
  Partition whole;
  whole.emplace_back(static_cast<std::size_t>(degree));
  std::iota(whole.front().begin(), whole.front().end(), 0);
  distinct.insert(singletons);
  distinct.insert(whole);
  out.assign(distinct.begin(), distinct.end());
  std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
    if (a.size() != b.size()) return a.size() > b.size();  // finest first
    return a < b;
  });
  return out;
}

bool is_primitive(const std::vector<Perm>& gens) {
  int degree = common_degree(gens);
  for (const auto& p : block_systems(gens))
    if (!is_trivial_partition(p, degree)) return false;
  return true;
}

DerivedSeries derived_series(const std::vector<Perm>& gens, long long cap) {
  common_degree(gens);
  DerivedSeries out;
  ClosureResult cl = closure(gens, cap);
  out.sizes.push_back(cl.size);
  if (cl.capped) {
    out.capped = true;
    return out;
  }
  if (cl.size == 1) {
    out.solvable = true;
    out.derived_length = 0;
    return out;
  }
  std::vector<Perm> current = gens;
  for (int level = 1; level <= 40; ++level) {
    bool gen_capped = false;
    std::vector<Perm> dgens = derived_generators(current, cap, &gen_capped);
    if (gen_capped) {
      out.capped = true;
      return out;
    }
    ClosureResult sub = closure(dgens, cap);
    out.sizes.push_back(sub.size);
    if (sub.capped) {
      out.capped = true;
      return out;
    }
    if (sub.size == 1) {
      out.solvable = true;
      out.derived_length = level;
      return out;
    }
    if (sub.size == out.sizes[static_cast<std::size_t>(level - 1)]) {
      out.solvable = false;  // perfect nontrivial derived subgroup
      return out;
    }
    current = std::move(dgens);
  }
  return out;  // undecided; series did not settle within the level bound
}

SupportReport finite_support_analysis(
    const std::vector<Perm>& gens,
    const std::vector<std::vector<int>>& escaped) {
  if (gens.size() != escaped.size())
    throw std::invalid_argument("one escape set per generator required");
  common_degree(gens);
  SupportReport rep;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Perm& g = gens[i];
    int moved = 0;
    for (int j = 0; j < g.degree(); ++j) {
      if (g(j) == j) continue;
      bool is_escaped = std::find(escaped[i].begin(), escaped[i].end(), j) !=
                        escaped[i].end();
      if (!is_escaped) ++moved;
    }
    if (moved > 0 && (rep.min_support == 0 || moved < rep.min_support))
      rep.min_support = moved;
    if (escaped[i].empty() && !g.is_identity()) rep.has_finite_support_gen = true;
  }
  return rep;
}

GroupReport build_group_report(const std::vector<Perm>& gens,
                               const std::vector<std::vector<int>>& escaped,
                               long long cap) {
  if (gens.size() != escaped.size())
    throw std::invalid_argument("one escape set per generator required");
  GroupReport rep;
  rep.degree = common_degree(gens);
  rep.generators = gens;
  rep.escaped = escaped;
  for (auto& e : rep.escaped) std::sort(e.begin(), e.end());

  std::vector<Perm> clean;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (rep.escaped[i].empty()) clean.push_back(gens[i]);
  rep.clean_generator_count = static_cast<int>(clean.size());

  // Orbits over witnessed edges: a tainted generator still witnessed the
  // moves of its non-escaped indices, but its artificial fixed points and
  // completion edges must not leak in.
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (int j = 0; j < rep.degree; ++j) {
      bool is_escaped = std::find(rep.escaped[i].begin(), rep.escaped[i].end(),
                                  j) != rep.escaped[i].end();
      if (!is_escaped) edges.emplace_back(j, gens[i](j));
    }
  rep.orbits = orbit_classes(rep.degree, edges);
  rep.transitive = rep.degree > 0 && rep.orbits.size() == 1;

  const bool tainted = clean.size() < gens.size();
  ClosureResult cl = closure(clean, cap);
  rep.closure_size = cl.size;
  rep.closure_capped = cl.capped;
  if (tainted)
    rep.notes.push_back(
        "escape-tainted generators excluded from closure and solvability");

  if (clean.empty() && !gens.empty()) {
    // Nothing fully witnessed: group-level claims stay open.
    rep.primitive = std::nullopt;
    rep.solvable = std::nullopt;
    rep.notes.push_back(
        "no escape-free generators; solvability and primitivity undecided");
  } else {
    DerivedSeries ds = derived_series(clean, cap);
    rep.solvable = ds.solvable;
    rep.derived_length = ds.derived_length;
    rep.derived_sizes = ds.sizes;
    if (rep.degree == 0) {
      rep.primitive = std::nullopt;
    } else if (!rep.transitive) {
      if (rep.orbits.size() > 1 &&
          rep.orbits.size() < static_cast<std::size_t>(rep.degree)) {
        rep.blocks = {rep.orbits};
        rep.primitive = false;
        rep.notes.push_back(
            "witnessed action is intransitive; orbit partition reported as "
            "decomposition witness");
      } else {
        rep.primitive = std::nullopt;
      }
    } else if (!clean.empty() && orbits(clean).size() == 1) {
      rep.blocks = block_systems(clean);
      bool prim = true;
      for (const auto& p : rep.blocks)
        if (!is_trivial_partition(p, rep.degree)) prim = false;
      rep.primitive = prim;
      if (tainted)
        rep.notes.push_back(
            "primitivity assessed on escape-free generators only");
    } else {
      rep.primitive = std::nullopt;
      rep.notes.push_back(
          "escape-free generators do not act transitively; primitivity "
          "undecided");
    }
  }

  SupportReport sup = finite_support_analysis(gens, rep.escaped);
  rep.has_finite_support_gen = sup.has_finite_support_gen;
  rep.min_support = sup.min_support;
  return rep;
}

}  // namespace gscope::permgroup
