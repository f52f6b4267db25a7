#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "invgen/bitset.hpp"
#include "invgen/errors.hpp"
#include "invgen/group.hpp"
#include "invgen/rational.hpp"
#include "invgen/subgroups.hpp"

namespace invgen {

// Which conjugacy classes meet the union of conjugates of each maximal
// subgroup class. A class c meets the union of conjugates of M iff it meets M.
struct ClassCoverageTable {
  std::string group_name;
  std::size_t order = 0;
  ConjugacyClasses classes;
  std::vector<MaximalClass> max_classes;
  std::vector<Bitset> covered_by;     // per class: mask over maximal classes
  std::vector<Bitset> covered_classes;  // per maximal class: mask over classes

  std::size_t r() const { return max_classes.size(); }
  bool covers(std::size_t cls, std::size_t m) const { return covered_by[cls].test(m); }
  Rational class_weight(std::size_t cls) const {
    return Rational(classes.classes[cls].size, static_cast<long long>(order));
  }
  /// Elements lying in some conjugate of maximal class m.
  std::size_t union_size(std::size_t m) const {
    std::size_t s = 0;
    covered_classes[m].for_each([&](std::size_t c) { s += classes.classes[c].size; });
    return s;
  }
};

inline ClassCoverageTable build_coverage(const Group& g, ConjugacyClasses classes,
                                         std::vector<MaximalClass> maxes) {
  ClassCoverageTable t;
  t.group_name = g.name();
  t.order = g.order();
  t.classes = std::move(classes);
  t.max_classes = std::move(maxes);
  const std::size_t nc = t.classes.size(), r = t.max_classes.size();
  t.covered_by.assign(nc, Bitset(r));
  t.covered_classes.assign(r, Bitset(nc));
  for (std::size_t m = 0; m < r; ++m)
    t.max_classes[m].representative.members.for_each([&](std::size_t x) {
      auto c = t.classes.class_of[x];
      t.covered_by[c].set(m);
      t.covered_classes[m].set(c);
    });
  return t;
}

inline ClassCoverageTable coverage_table(const Group& g, const SubgroupLattice& lat) {
  return build_coverage(g, conjugacy_classes(g), maximal_subgroups_up_to_conjugacy(g, lat));
}

inline ClassCoverageTable coverage_table(const Group& g) { return coverage_table(g, subgroup_lattice(g)); }

/// True iff no maximal class has every element of gs in the union of its conjugates.
inline bool invariably_generates(const ClassCoverageTable& t, std::span<const Elem> gs) {
  for (Elem x : gs)
    if (x >= t.order) throw InputError("element index " + std::to_string(x) + " outside group");
  if (t.r() == 0) return true;
  Bitset alive(t.r());
  alive.set_all();
  for (Elem x : gs) {
    alive &= t.covered_by[t.classes.class_of[x]];
    if (alive.none()) return true;
  }
  return false;
}

inline bool invariably_generates(const Group& g, std::span<const Elem> gs) {
  return invariably_generates(coverage_table(g), gs);
}

/// Proportion of elements with no fixed point on the cosets of M, computed
/// from the union of the conjugates of M.
inline Rational fpf_proportion(const Group& g, const SubgroupRecord& m) {
  if (m.order() >= g.order()) throw PreconditionError("fpf_proportion: M must be a proper subgroup");
  Bitset u = m.members;
  std::vector<Bitset> orbit{m.members};
  std::unordered_map<Bitset, bool, BitsetHash> seen{{m.members, true}};
  for (std::size_t pos = 0; pos < orbit.size(); ++pos)
    for (Elem x : g.generator_indices()) {
      auto c = conjugate_set(g, orbit[pos], x);
      if (seen.emplace(c, true).second) {
        u |= c;
        orbit.push_back(std::move(c));
      }
    }
  return Rational(static_cast<long long>(g.order() - u.count()), static_cast<long long>(g.order()));
}

/// Rows are classes (representative, size), columns maximal classes, cells 0/1.
inline void write_coverage_csv(std::ostream& os, const Group& g, const ClassCoverageTable& t) {
  os << "class,representative,size";
  for (std::size_t m = 0; m < t.r(); ++m) os << ",M" << (m + 1) << "_order" << t.max_classes[m].representative.order();
  os << '\n';
  for (std::size_t c = 0; c < t.classes.size(); ++c) {
    os << c << ",\"" << g.element(t.classes.classes[c].representative).cycle_string() << "\","
       << t.classes.classes[c].size;
    for (std::size_t m = 0; m < t.r(); ++m) os << ',' << (t.covers(c, m) ? 1 : 0);
    os << '\n';
  }
}

}  // namespace invgen
