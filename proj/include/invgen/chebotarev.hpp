#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "invgen/bitset.hpp"
#include "invgen/errors.hpp"
#include "invgen/invariable.hpp"
#include "invgen/rational.hpp"
#include "invgen/rng.hpp"

namespace invgen {

inline constexpr std::size_t kInclusionExclusionCap = 25;
inline constexpr std::uint64_t kMaxDrawsPerTrial = 1000000;

// The inclusion-exclusion expansion over nonempty sets T of maximal classes,
// collapsed by c_T = |intersection over M in T of the union of conjugates of M|.
// coef[c] is the signed count sum of (-1)^(|T|+1) over T with c_T = c, so
//   P(no draw escapes some T) expansions become sums over at most |G| values.
struct InclusionExclusion {
  std::size_t order = 0;
  std::size_t r = 0;
  std::map<std::size_t, std::int64_t> coef;  // c -> signed multiplicity, zero entries dropped
};

inline InclusionExclusion inclusion_exclusion(const ClassCoverageTable& t,
                                              std::size_t cap = kInclusionExclusionCap) {
  const std::size_t r = t.r();
  if (r > cap)
    throw CapExceeded("inclusion-exclusion (r = " + std::to_string(r) + " maximal classes; use Monte Carlo)",
                      cap);
  InclusionExclusion ie;
  ie.order = t.order;
  ie.r = r;
  if (r == 0) return ie;

  const std::size_t nc = t.classes.size();
  std::vector<std::size_t> size(nc);
  for (std::size_t c = 0; c < nc; ++c) size[c] = t.classes.classes[c].size;
  auto weight = [&](const Bitset& mask) {
    std::size_t w = 0;
    mask.for_each([&](std::size_t c) { w += size[c]; });
    return w;
  };

  std::vector<std::int64_t> acc(t.order + 1, 0);
  // Depth-first over subsets in increasing index order. A node whose class
  // mask is already inside the cover of some later index j contributes zero
  // together with its whole subtree: toggling j pairs terms of opposite sign
  // with the same c.
  std::vector<Bitset> stack(r + 1, Bitset(nc));
  stack[0].set_all();
  struct Frame {
    std::size_t next;
  };
  std::vector<Frame> frames(r + 1);
  std::size_t depth = 0;
  frames[0].next = 0;
  while (true) {
    if (frames[depth].next >= r) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    const std::size_t j = frames[depth].next++;
    Bitset& mask = stack[depth + 1];
    mask.assign_and(stack[depth], t.covered_classes[j]);
    bool cancels = false;
    for (std::size_t k = j + 1; k < r && !cancels; ++k)
      if (mask.is_subset_of(t.covered_classes[k])) cancels = true;
    if (cancels) continue;
    const std::size_t c = weight(mask);
    acc[c] += ((depth + 1) % 2 == 1) ? 1 : -1;
    ++depth;
    frames[depth].next = j + 1;
  }
  for (std::size_t c = 0; c <= t.order; ++c)
    if (acc[c] != 0) ie.coef.emplace(c, acc[c]);
  return ie;
}

/// P_I(G, k). Conventions: P_I(1, k) = 1 and P_I(G, 0) = 0 for G != 1.
inline Rational p_invariable_exact(const InclusionExclusion& ie, unsigned k) {
  if (ie.r == 0) return Rational(1);
  BigInt den = boost::multiprecision::pow(BigInt(ie.order), k);
  BigInt s = 0;
  for (auto [c, m] : ie.coef) s += BigInt(m) * boost::multiprecision::pow(BigInt(c), k);
  return Rational(den - s, den);
}

inline Rational p_invariable_exact(const ClassCoverageTable& t, unsigned k) {
  return p_invariable_exact(inclusion_exclusion(t), k);
}

/// C(G) = sum over T of (-1)^(|T|+1) / (1 - q_T), from E[N] = sum_n P(N > n).
inline Rational chebotarev_exact(const InclusionExclusion& ie) {
  if (ie.r == 0) return Rational(0);
  Rational sum = 0;
  for (auto [c, m] : ie.coef) {
    if (c >= ie.order) throw InvariantBreach("union of conjugates of a maximal subgroup covers G");
    sum += Rational(BigInt(m) * ie.order, BigInt(ie.order - c));
  }
  return sum;
}

inline Rational chebotarev_exact(const ClassCoverageTable& t) { return chebotarev_exact(inclusion_exclusion(t)); }

/// Bound on sum_{n >= start} (1 - P_I(G, n)), i.e. what truncating the
/// waiting-time series at `start` can miss.
inline Rational waiting_time_tail_bound(const InclusionExclusion& ie, unsigned start) {
  Rational bound = 0;
  for (auto [c, m] : ie.coef) {
    BigInt a = m < 0 ? BigInt(-m) : BigInt(m);
    Rational q(BigInt(c), BigInt(ie.order));
    bound += a * Rational(boost::multiprecision::pow(BigInt(c), start),
                          boost::multiprecision::pow(BigInt(ie.order), start)) /
             (1 - q);
  }
  return bound;
}

/// Least k with P_I(G, k) >= threshold.
inline unsigned min_k_for_probability(const InclusionExclusion& ie, const Rational& threshold,
                                      unsigned kmax = 100000) {
  if (ie.r == 0) return 0;  // P_I(1, 0) = 1
  if (threshold <= 0) return 0;
  if (threshold > 1) throw PreconditionError("threshold above 1 is never reached");
  const BigInt tn = numerator_of(threshold), td = denominator_of(threshold);
  std::vector<std::pair<BigInt, BigInt>> powers;  // (c^k, m)
  for (auto [c, m] : ie.coef) powers.emplace_back(BigInt(1), BigInt(m));
  std::vector<std::size_t> cs;
  for (auto [c, m] : ie.coef) cs.push_back(c);
  BigInt den = 1;
  for (unsigned k = 0; k <= kmax; ++k) {
    BigInt s = 0;
    for (const auto& [pw, m] : powers) s += m * pw;
    // P_I = (den - s) / den >= tn / td
    if ((den - s) * td >= tn * den) return k;
    den *= ie.order;
    for (std::size_t i = 0; i < powers.size(); ++i) powers[i].first *= cs[i];
  }
  throw CapExceeded("min_k search", kmax);
}

struct McEstimate {
  double estimate = 0;
  double stderr_ = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Waiting time of one trial: draws until no maximal class covers all draws.
inline std::uint64_t waiting_time(const ClassCoverageTable& t, TrialRng& rng) {
  if (t.r() == 0) return 0;
  Bitset alive(t.r());
  alive.set_all();
  std::uint64_t n = 0;
  while (alive.any()) {
    if (++n > kMaxDrawsPerTrial)
      throw InvariantBreach("Monte Carlo trial exceeded " + std::to_string(kMaxDrawsPerTrial) + " draws on " +
                            t.group_name);
    Elem x = static_cast<Elem>(rng.uniform(t.order));
    alive &= t.covered_by[t.classes.class_of[x]];
  }
  return n;
}

/// Mean waiting time over `trials` independent trials; trial i draws from
/// TrialRng(seed, i), so the result does not depend on `threads`.
inline McEstimate chebotarev_montecarlo(const ClassCoverageTable& t, std::uint64_t trials, std::uint64_t seed,
                                        unsigned threads = 1) {
  if (trials < 1) throw PreconditionError("Monte Carlo needs at least one trial");
  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  if (t.r() == 0) return est;
  threads = std::max(1u, threads);
  struct Acc {
    std::uint64_t sum = 0;
    unsigned __int128 sumsq = 0;
  };
  std::vector<Acc> parts(threads);
  auto run = [&](unsigned w) {
    for (std::uint64_t i = w; i < trials; i += threads) {
      TrialRng rng(seed, i);
      auto n = waiting_time(t, rng);
      parts[w].sum += n;
      parts[w].sumsq += static_cast<unsigned __int128>(n) * n;
    }
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          run(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::uint64_t sum = 0;
  unsigned __int128 sumsq = 0;
  for (const auto& p : parts) {
    sum += p.sum;
    sumsq += p.sumsq;
  }
  const double nt = static_cast<double>(trials);
  const double mean = static_cast<double>(sum) / nt;
  est.estimate = mean;
  if (trials > 1) {
    // sum of squared deviations, kept exact until the final division
    const unsigned __int128 s2 = sumsq * trials - static_cast<unsigned __int128>(sum) * sum;
    const double var = static_cast<double>(s2) / (nt * (nt - 1));
    est.stderr_ = std::sqrt(var / nt);
  }
  return est;
}

}  // namespace invgen
