#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gscope::permgroup {

class DegreeMismatch : public std::runtime_error {
 public:
  DegreeMismatch() : std::runtime_error("permutations have different degrees") {}
};

class NotTransitive : public std::runtime_error {
 public:
  NotTransitive() : std::runtime_error("action is not transitive") {}
};

/// Permutation of {0..n-1}. Immutable; construction validates bijectivity.
class Perm {
 public:
  explicit Perm(std::vector<int> images);
  static Perm identity(int degree);
  /// Build from disjoint cycles, e.g. {{0,1},{2,3}} on the given degree.
  static Perm from_cycles(int degree, const std::vector<std::vector<int>>& cycles);

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& images() const { return images_; }

  /// Function composition: (a.compose(b))(x) = a(b(x)), b acts first.
  Perm compose(const Perm& other) const;
  Perm inverse() const;
  bool is_identity() const;
  int support_size() const;  // number of moved points

  /// Nontrivial cycles, each rotated to start at its smallest element,
  /// sorted by that element.
  std::vector<std::vector<int>> cycles() const;
  /// "(0 1)(2 3)"; the identity prints as "()".
  std::string cycle_notation() const;
  /// Sorted lengths of the nontrivial cycles, e.g. (0 1)(2 3 4) -> {2, 3}.
  std::vector<int> cycle_type() const;

  friend bool operator==(const Perm&, const Perm&) = default;
  friend std::strong_ordering operator<=>(const Perm& a, const Perm& b) {
    return a.images_ <=> b.images_;
  }

 private:
  std::vector<int> images_;
};

struct ClosureResult {
  std::vector<Perm> elements;  // sorted; empty when capped
  long long size = 0;          // element count reached (cap+1 when capped)
  bool capped = false;
};

/// Breadth-first closure of the generated subgroup, stopping once the element
/// count exceeds cap.
ClosureResult closure(const std::vector<Perm>& gens, long long cap);

/// Connected components of the union of generator graphs; classes sorted
/// internally and by smallest member. degree_hint covers the gens-empty case.
std::vector<std::vector<int>> orbits(const std::vector<Perm>& gens,
                                     int degree_hint = 0);

using Partition = std::vector<std::vector<int>>;

/// All block systems obtained as the finest system fusing 0 with each other
/// point, plus the two trivial systems, deduplicated. Sorted from finest
/// (singletons) to coarsest. Throws NotTransitive.
std::vector<Partition> block_systems(const std::vector<Perm>& gens);

/// True iff the only block systems are the trivial ones. Throws NotTransitive.
bool is_primitive(const std::vector<Perm>& gens);

struct DerivedSeries {
  std::optional<bool> solvable;       // nullopt = undecided under the cap
  std::optional<int> derived_length;  // set only when solvable is true
  std::vector<long long> sizes;       // |G|, |G'|, |G''|, ...
  bool capped = false;
};

/// Derived series via commutator generators closed under conjugation.
/// Stops at the trivial group (solvable) or a nontrivial fixed point
/// (unsolvable); a capped closure mid-series leaves the outcome undecided.
DerivedSeries derived_series(const std::vector<Perm>& gens, long long cap);

struct SupportReport {
  bool has_finite_support_gen = false;
  int min_support = 0;  // smallest nonzero witnessed support; 0 when none
};

/// Witnessed-support statistics. escaped[i] lists the indices whose fate is
/// unknown for generator i; such a generator cannot witness finite support.
SupportReport finite_support_analysis(
    const std::vector<Perm>& gens,
    const std::vector<std::vector<int>>& escaped);

struct GroupReport {
  int degree = 0;
  std::vector<Perm> generators;           // escape indices act as fixed points
  std::vector<std::vector<int>> escaped;  // per generator, sorted
  long long closure_size = 0;             // over the escape-free generators
  bool closure_capped = false;
  std::vector<std::vector<int>> orbits;   // from witnessed edges only
  bool transitive = false;
  std::vector<Partition> blocks;
  std::optional<bool> primitive;
  std::optional<bool> solvable;
  std::optional<int> derived_length;
  std::vector<long long> derived_sizes;
  bool has_finite_support_gen = false;
  int min_support = 0;
  int clean_generator_count = 0;
  std::vector<std::string> notes;
};

/// Assemble the group-theoretic evidence from tracked generators.
/// Escape-tainted generators are kept for orbit evidence (their witnessed
/// edges are real) but excluded from closure, solvability, block and
/// finite-support claims. An intransitive witnessed action reports its orbit
/// partition as the decomposition witness instead of calling block_systems.
GroupReport build_group_report(const std::vector<Perm>& gens,
                               const std::vector<std::vector<int>>& escaped,
                               long long cap);

}  // namespace gscope::permgroup
