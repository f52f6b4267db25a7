#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "invgen/families.hpp"
#include "invgen/invariable.hpp"
#include "invgen/oracle.hpp"

using namespace invgen;

namespace {

Elem elem(const Group& g, int degree, std::vector<std::vector<int>> cycles) {
  return g.index_of(Permutation::from_cycles(degree, cycles));
}

std::size_t class_index(const ClassCoverageTable& t, Elem x) { return t.classes.class_of[x]; }

// Index of the maximal class whose representative has the given order.
std::size_t max_class_of_order(const ClassCoverageTable& t, std::size_t order) {
  for (std::size_t m = 0; m < t.r(); ++m)
    if (t.max_classes[m].representative.order() == order) return m;
  ADD_FAILURE() << "no maximal class of order " << order;
  return 0;
}

std::vector<Group> small_corpus() {
  return {families::cyclic(2),        families::cyclic(6),    families::symmetric(3),
          families::symmetric(4),     families::dihedral(4),  families::dihedral(5),
          families::alternating(4),   families::agl1(5),      families::elementary_abelian(2, 3),
          families::symmetric(5)};
}

}  // namespace

TEST(Coverage, Sym3Cells) {
  auto g = families::symmetric(3);
  auto t = coverage_table(g);
  ASSERT_EQ(t.r(), 2u);
  auto alt = max_class_of_order(t, 3), two = max_class_of_order(t, 2);
  auto c3 = class_index(t, elem(g, 3, {{1, 2, 3}}));
  auto tr = class_index(t, elem(g, 3, {{1, 2}}));
  EXPECT_TRUE(t.covers(c3, alt));
  EXPECT_FALSE(t.covers(tr, alt));
  EXPECT_TRUE(t.covers(tr, two));
  EXPECT_FALSE(t.covers(c3, two));
}

TEST(Coverage, CyclicPrimeOnlyIdentity) {
  auto t = coverage_table(families::cyclic(7));
  ASSERT_EQ(t.r(), 1u);
  for (std::size_t c = 0; c < t.classes.size(); ++c)
    EXPECT_EQ(t.covers(c, 0), t.classes.classes[c].representative == 0);
}

TEST(Coverage, TableInvariants) {
  for (const auto& g : small_corpus()) {
    auto t = coverage_table(g);
    auto id = class_index(t, Group::identity());
    for (std::size_t m = 0; m < t.r(); ++m) {
      EXPECT_TRUE(t.covers(id, m)) << g.name();
      // union size agrees with enumerating conjugates of the representative
      Bitset u = g.empty_set();
      for (Elem x = 0; x < g.order(); ++x) u |= conjugate_set(g, t.max_classes[m].representative.members, x);
      EXPECT_EQ(t.union_size(m), u.count()) << g.name();
      EXPECT_LT(t.union_size(m), g.order()) << g.name();
    }
  }
}

TEST(Invariable, Sym3Examples) {
  auto g = families::symmetric(3);
  std::vector<Elem> both{elem(g, 3, {{1, 2, 3}}), elem(g, 3, {{1, 2}})};
  EXPECT_TRUE(invariably_generates(g, both));
  EXPECT_TRUE(oracle::invariably_generates_exhaustive(g, both));
  std::vector<Elem> one{elem(g, 3, {{1, 2, 3}})};
  EXPECT_FALSE(invariably_generates(g, one));
  EXPECT_FALSE(invariably_generates(g, std::vector<Elem>{}));
  EXPECT_TRUE(invariably_generates(families::trivial(), std::vector<Elem>{}));
}

TEST(Invariable, RejectsOutsideElement) {
  auto g = families::symmetric(3);
  std::vector<Elem> bad{6};
  EXPECT_THROW(invariably_generates(g, bad), InputError);
}

TEST(Invariable, AgreesWithExhaustiveDefinition) {
  std::mt19937_64 rng(11);
  for (const auto& g : small_corpus()) {
    if (g.order() > 120) continue;
    auto t = coverage_table(g);
    auto lat = subgroup_lattice(g);
    std::uniform_int_distribution<Elem> pick(0, static_cast<Elem>(g.order() - 1));
    std::uniform_int_distribution<int> len(1, 3);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<Elem> gs(len(rng));
      for (auto& x : gs) x = pick(rng);
      bool fast = invariably_generates(t, gs);
      ASSERT_EQ(fast, oracle::invariably_generates_via_all_maximals(g, lat, gs)) << g.name();
      if (g.order() <= 60 || trial < 20) {
        ASSERT_EQ(fast, oracle::invariably_generates_exhaustive(g, gs)) << g.name();
      }
    }
  }
}

TEST(Invariable, MonotoneUnderSupersequence) {
  std::mt19937_64 rng(12);
  for (const auto& g : small_corpus()) {
    auto t = coverage_table(g);
    std::uniform_int_distribution<Elem> pick(0, static_cast<Elem>(g.order() - 1));
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Elem> gs{pick(rng), pick(rng)};
      if (!invariably_generates(t, gs)) continue;
      gs.push_back(pick(rng));
      EXPECT_TRUE(invariably_generates(t, gs)) << g.name();
    }
  }
}

TEST(Invariable, ConjugationInvariant) {
  std::mt19937_64 rng(13);
  for (const auto& g : small_corpus()) {
    auto t = coverage_table(g);
    std::uniform_int_distribution<Elem> pick(0, static_cast<Elem>(g.order() - 1));
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Elem> gs{pick(rng), pick(rng)}, conj;
      for (Elem x : gs) conj.push_back(g.conj(x, pick(rng)));
      EXPECT_EQ(invariably_generates(t, gs), invariably_generates(t, conj)) << g.name();
    }
  }
}

TEST(Fpf, Sym3Values) {
  auto g = families::symmetric(3);
  auto alt = generated_subgroup(g, std::vector<Elem>{elem(g, 3, {{1, 2, 3}})});
  auto two = generated_subgroup(g, std::vector<Elem>{elem(g, 3, {{1, 2}})});
  EXPECT_EQ(fpf_proportion(g, alt), Rational(1, 2));
  EXPECT_EQ(fpf_proportion(g, two), Rational(1, 3));
  EXPECT_THROW(fpf_proportion(g, whole_group(g)), PreconditionError);
}

TEST(Fpf, CyclicRegular) {
  for (int p : {2, 3, 5, 7, 11}) {
    auto g = families::cyclic(p);
    EXPECT_EQ(fpf_proportion(g, trivial_subgroup(g)), Rational(p - 1, p));
  }
}

TEST(Fpf, MatchesClassWeights) {
  for (const auto& g : small_corpus()) {
    auto t = coverage_table(g);
    for (std::size_t m = 0; m < t.r(); ++m) {
      Rational covered = 0;
      for (std::size_t c = 0; c < t.classes.size(); ++c)
        if (t.covers(c, m)) covered += t.class_weight(c);
      EXPECT_EQ(fpf_proportion(g, t.max_classes[m].representative), 1 - covered) << g.name();
    }
  }
}

TEST(Coverage, CsvShape) {
  auto g = families::symmetric(3);
  auto t = coverage_table(g);
  std::ostringstream os;
  write_coverage_csv(os, g, t);
  auto s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
  EXPECT_EQ(s.rfind("class,representative,size,M1_order", 0), 0u);
}
