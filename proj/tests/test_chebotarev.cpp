#include <gtest/gtest.h>

#include <cmath>

#include "invgen/chebotarev.hpp"
#include "invgen/families.hpp"
#include "invgen/oracle.hpp"

using namespace invgen;

namespace {

std::vector<Group> corpus() {
  return {families::cyclic(2),      families::cyclic(3),     families::cyclic(4),    families::cyclic(6),
          families::symmetric(3),   families::symmetric(4),  families::dihedral(4), families::dihedral(5),
          families::alternating(4), families::agl1(5),       families::agl1(4),      families::elementary_abelian(2, 3),
          families::alternating(5)};
}

// P_I(G, k) by enumerating every k-tuple and applying the class criterion.
Rational brute_p_invariable(const Group& g, const ClassCoverageTable& t, unsigned k) {
  std::vector<Elem> tuple(k, 0);
  std::size_t good = 0, total = 0;
  while (true) {
    ++total;
    if (invariably_generates(t, tuple)) ++good;
    std::size_t i = 0;
    while (i < k && ++tuple[i] == g.order()) tuple[i++] = 0;
    if (i == k) break;
  }
  return Rational(static_cast<long long>(good), static_cast<long long>(total));
}

// Inclusion-exclusion over every nonempty subset, without collapsing or pruning.
InclusionExclusion naive_ie(const ClassCoverageTable& t) {
  InclusionExclusion ie;
  ie.order = t.order;
  ie.r = t.r();
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << t.r()); ++s) {
    Bitset mask(t.classes.size());
    mask.set_all();
    int bits = 0;
    for (std::size_t m = 0; m < t.r(); ++m)
      if (s >> m & 1) {
        mask &= t.covered_classes[m];
        ++bits;
      }
    std::size_t c = 0;
    mask.for_each([&](std::size_t i) { c += t.classes.classes[i].size; });
    ie.coef[c] += bits % 2 ? 1 : -1;
  }
  std::erase_if(ie.coef, [](const auto& kv) { return kv.second == 0; });
  return ie;
}

}  // namespace

TEST(Chebotarev, CyclicPrime) {
  for (int p : {2, 3, 5, 7, 11}) {
    auto t = coverage_table(families::cyclic(p));
    EXPECT_EQ(chebotarev_exact(t), Rational(p, p - 1)) << p;
  }
}

TEST(Chebotarev, Sym3) {
  auto g = families::symmetric(3);
  auto t = coverage_table(g);
  EXPECT_EQ(chebotarev_exact(t), Rational(19, 5));
  EXPECT_EQ(p_invariable_exact(t, 1), Rational(0));
  EXPECT_EQ(p_invariable_exact(t, 2), Rational(1, 3));
}

TEST(Chebotarev, Sym3PairsExhaustive) {
  auto g = families::symmetric(3);
  std::size_t good = 0;
  for (Elem a = 0; a < g.order(); ++a)
    for (Elem b = 0; b < g.order(); ++b) {
      std::vector<Elem> gs{a, b};
      if (oracle::invariably_generates_exhaustive(g, gs)) ++good;
    }
  EXPECT_EQ(Rational(static_cast<long long>(good), 36), Rational(1, 3));
}

TEST(Chebotarev, Conventions) {
  auto triv = coverage_table(families::trivial());
  EXPECT_EQ(chebotarev_exact(triv), Rational(0));
  EXPECT_EQ(p_invariable_exact(triv, 0), Rational(1));
  EXPECT_EQ(p_invariable_exact(triv, 3), Rational(1));
  auto c2 = coverage_table(families::cyclic(2));
  EXPECT_EQ(p_invariable_exact(c2, 0), Rational(0));
  EXPECT_EQ(p_invariable_exact(c2, 1), Rational(1, 2));
  auto mc = chebotarev_montecarlo(triv, 100, 1);
  EXPECT_EQ(mc.estimate, 0.0);
  EXPECT_EQ(mc.stderr_, 0.0);
}

TEST(Chebotarev, PrunedExpansionMatchesNaive) {
  for (const auto& g : corpus()) {
    auto t = coverage_table(g);
    if (t.r() > 16) continue;
    auto fast = inclusion_exclusion(t), slow = naive_ie(t);
    EXPECT_EQ(fast.coef, slow.coef) << g.name();
  }
}

TEST(Chebotarev, MatchesTupleEnumeration) {
  for (const auto& g : corpus()) {
    if (g.order() > 24) continue;
    auto t = coverage_table(g);
    auto ie = inclusion_exclusion(t);
    for (unsigned k = 0; k <= 3; ++k) EXPECT_EQ(p_invariable_exact(ie, k), brute_p_invariable(g, t, k)) << g.name();
  }
}

TEST(Chebotarev, CapExceeded) {
  auto t = coverage_table(families::symmetric(4));
  EXPECT_THROW(inclusion_exclusion(t, 1), CapExceeded);
}

TEST(Chebotarev, MonotoneInK) {
  for (const auto& g : corpus()) {
    auto ie = inclusion_exclusion(coverage_table(g));
    Rational prev = p_invariable_exact(ie, 0);
    for (unsigned k = 1; k <= 50; ++k) {
      auto cur = p_invariable_exact(ie, k);
      EXPECT_LE(prev, cur) << g.name() << " k=" << k;
      prev = cur;
    }
  }
}

TEST(Chebotarev, WaitingTimeIdentity) {
  for (const auto& g : corpus()) {
    auto ie = inclusion_exclusion(coverage_table(g));
    Rational partial = 0;
    for (unsigned n = 0; n < 400; ++n) partial += 1 - p_invariable_exact(ie, n);
    auto tail = waiting_time_tail_bound(ie, 400);
    auto exact = chebotarev_exact(ie);
    Rational diff = exact - partial;
    if (diff < 0) diff = -diff;
    EXPECT_LE(diff, tail) << g.name();
  }
}

TEST(Chebotarev, ReductionBound) {
  for (const auto& g : corpus()) {
    auto ie = inclusion_exclusion(coverage_table(g));
    auto c = chebotarev_exact(ie);
    EXPECT_GE(c, 1) << g.name();
    for (unsigned k = 1; k <= 50; ++k) {
      auto p = p_invariable_exact(ie, k);
      if (p > 0) {
        EXPECT_LE(c, Rational(k) / p) << g.name() << " k=" << k;
      }
    }
  }
}

TEST(Chebotarev, QuotientMonotone) {
  for (const auto& g : corpus()) {
    if (g.order() > 500) continue;
    auto lat = subgroup_lattice(g);
    auto c = chebotarev_exact(coverage_table(g, lat));
    for (const auto& n : normal_subgroups(lat)) {
      auto q = quotient(g, n, &lat);
      EXPECT_LE(chebotarev_exact(coverage_table(q.group)), c) << g.name() << " / order " << n.order();
    }
  }
}

TEST(MinK, Examples) {
  auto s3 = inclusion_exclusion(coverage_table(families::symmetric(3)));
  EXPECT_EQ(min_k_for_probability(s3, Rational(2, 9)), 2u);
  EXPECT_EQ(min_k_for_probability(s3, Rational(0)), 0u);
  auto c2 = inclusion_exclusion(coverage_table(families::cyclic(2)));
  EXPECT_EQ(min_k_for_probability(c2, Rational(1, 2)), 1u);
  EXPECT_THROW(min_k_for_probability(c2, Rational(3, 2)), PreconditionError);
}

TEST(MinK, IsLeast) {
  for (const auto& g : corpus()) {
    auto ie = inclusion_exclusion(coverage_table(g));
    auto k = min_k_for_probability(ie, Rational(2, 9));
    EXPECT_GE(p_invariable_exact(ie, k), Rational(2, 9)) << g.name();
    if (k > 0) {
      EXPECT_LT(p_invariable_exact(ie, k - 1), Rational(2, 9)) << g.name();
    }
  }
}

TEST(MonteCarlo, Consistent) {
  for (const auto& g : corpus()) {
    auto t = coverage_table(g);
    auto exact = to_double(chebotarev_exact(t));
    auto mc = chebotarev_montecarlo(t, 20000, 7);
    ASSERT_GT(mc.stderr_, 0) << g.name();
    EXPECT_LT(std::abs(mc.estimate - exact) / mc.stderr_, 4.5) << g.name();
  }
}

TEST(MonteCarlo, ThreadCountIrrelevant) {
  auto t = coverage_table(families::symmetric(4));
  auto a = chebotarev_montecarlo(t, 5000, 99, 1);
  auto b = chebotarev_montecarlo(t, 5000, 99, 3);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.stderr_, b.stderr_);
  auto c = chebotarev_montecarlo(t, 5000, 100, 1);
  EXPECT_NE(a.estimate, c.estimate);
}

TEST(MonteCarlo, RejectsZeroTrials) {
  EXPECT_THROW(chebotarev_montecarlo(coverage_table(families::cyclic(2)), 0, 1), PreconditionError);
}
