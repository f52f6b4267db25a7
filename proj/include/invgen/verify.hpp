#pragma once

// Property suites behind `invgen verify` and the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgen/battery.hpp"
#include "invgen/chebotarev.hpp"
#include "invgen/crowns.hpp"
#include "invgen/families.hpp"
#include "invgen/genlift.hpp"
#include "invgen/harness.hpp"
#include "invgen/oracle.hpp"
#include "invgen/rng.hpp"
#include "invgen/semidirect.hpp"

namespace invgen {

struct SuiteResult {
  std::string name;
  std::size_t checked = 0;
  std::vector<std::string> violations = {};

  void check(bool ok, const std::string& what) {
    ++checked;
    if (!ok && violations.size() < 50) violations.push_back(what);
  }
  bool ok() const { return violations.empty(); }
  nlohmann::json to_json() const { return {{"suite", name}, {"checked", checked}, {"violations", violations}}; }
};

// ---------------------------------------------------------------------------
// Lifting criteria against the constructed groups

struct CrossValidation {
  std::size_t instances = 0, checked = 0, gen_true = 0, inv_true = 0;
  std::vector<std::string> disagreements;
};

/// For every faithful irreducible battery module and u >= 1 with |V|^u <= 256
/// and |V^u x| H| <= 2000: gen_criterion against closure and invgen_criterion
/// against the literal invariable test, over all ws when there are at most
/// exhaustive_limit of them, otherwise over random_runs random ones.
inline CrossValidation cross_validate_criteria(const std::vector<NamedModule>& modules, std::size_t random_runs,
                                               std::uint64_t seed, std::size_t exhaustive_limit = 1024) {
  CrossValidation cv;
  std::uint64_t stream = 0;
  for (const auto& nm : modules) {
    if (!nm.act.irreducible || !nm.act.faithful || nm.act.group.is_trivial()) continue;
    auto ctx = make_lift_context(nm.act);
    const auto vsize = ctx.act.module_order();
    auto gen_hs = ctx.act.group.generator_indices();
    auto inv_hs = short_invariable_tuple(ctx.coverage);
    for (std::size_t u = 1;; ++u) {
      std::size_t vu = 1;
      for (std::size_t i = 0; i < u; ++i) vu *= vsize;
      if (vu > 256 || vu * ctx.act.group.order() > 2000) break;
      AffineLift lift(ctx.act, u);
      auto amb = lift.group();
      ++cv.instances;
      for (int mode = 0; mode < 2; ++mode) {
        if (mode == 1 && !inv_hs) continue;
        const auto& hs = mode == 0 ? gen_hs : *inv_hs;
        const std::size_t d = hs.size(), len = u * ctx.act.dim;
        const double space = std::pow(static_cast<double>(ctx.act.p), static_cast<double>(d * len));
        const bool exhaustive = space <= static_cast<double>(exhaustive_limit);
        const std::size_t runs = exhaustive ? static_cast<std::size_t>(space) : random_runs;
        TrialRng rng(seed, stream++);
        for (std::size_t k = 0; k < runs; ++k) {
          LiftProblem pr{u, hs, std::vector<GFVector>(d, GFVector(len))};
          auto flat = exhaustive ? decode_vector(k, ctx.act.p, d * len) : GFVector(d * len);
          if (!exhaustive)
            for (auto& x : flat) x = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(ctx.act.p)));
          for (std::size_t i = 0; i < d; ++i)
            std::copy(flat.begin() + i * len, flat.begin() + (i + 1) * len, pr.ws[i].begin());
          std::vector<Elem> xs;
          for (std::size_t i = 0; i < d; ++i) xs.push_back(amb.index_of(lift.element(hs[i], pr.ws[i])));
          bool crit, brute;
          if (mode == 0) {
            crit = gen_criterion(ctx, pr);
            brute = generates(amb, xs);
            cv.gen_true += crit;
          } else {
            crit = invgen_criterion(ctx, pr);
            brute = oracle::invariably_generates_literal(amb, xs);
            cv.inv_true += crit;
          }
          ++cv.checked;
          if (crit != brute && cv.disagreements.size() < 20)
            cv.disagreements.push_back(nm.name + " u=" + std::to_string(u) + (mode ? " invgen" : " gen") +
                                       " ws#" + std::to_string(k));
        }
      }
    }
  }
  return cv;
}

/// The dimension bound on random (module, generating tuple) instances.
inline SuiteResult dimen_suite(std::size_t instances, std::uint64_t seed) {
  SuiteResult s{"dimen"};
  std::vector<LiftContext> ctxs;
  for (auto& nm : module_battery())
    if (nm.act.irreducible && !nm.act.group.is_trivial()) ctxs.push_back(make_lift_context(nm.act));
  TrialRng rng(seed, 0xd1);
  while (s.checked < instances) {
    const auto& ctx = ctxs[rng.uniform(ctxs.size())];
    const auto& h = ctx.act.group;
    std::vector<Elem> hs(1 + rng.uniform(4));
    for (auto& x : hs) x = static_cast<Elem>(rng.uniform(h.order()));
    if (!generates(h, hs)) continue;
    auto c = dimen_bound_check(ctx, hs);
    s.check(c.holds, h.name() + ": lhs " + std::to_string(c.lhs) + " < rhs " + std::to_string(c.rhs));
  }
  return s;
}

/// 2m <= n (faithful, absolutely irreducible), m = 0 for coprime order, and
/// dim_p Der = e (n + m) on the module battery.
inline SuiteResult cohomology_suite() {
  SuiteResult s{"cohomology"};
  for (auto& nm : module_battery()) {
    if (!nm.act.irreducible || nm.act.group.is_trivial()) continue;
    auto field = end_algebra(nm.act);
    auto der = derivation_space(nm.act);
    if (nm.act.faithful && nm.act.absolutely_irreducible) s.check(2 * der.m <= field.n, nm.name + ": 2m > n");
    if (std::gcd(nm.act.group.order(), static_cast<std::size_t>(nm.act.p)) == 1)
      s.check(der.m == 0, nm.name + ": m != 0 for coprime order");
    s.check(der.dim_der == field.e * (field.n + der.m), nm.name + ": dim Der != n + m over F");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Groups used by the suites

inline std::vector<Group> verify_groups() {
  return {families::cyclic(2),  families::cyclic(6),           families::cyclic(8),
          families::symmetric(3), families::dihedral(4),       families::dihedral(5),
          families::alternating(4), families::symmetric(4),    families::elementary_abelian(2, 3),
          families::agl1(5),    families::agl1(8),             families::alternating(5)};
}

inline bool frattini_trivial(const NormalStructure& ns) {
  return frattini_over(ns, trivial_subgroup(ns.group).members).count() == 1;
}

inline SuiteResult coverage_suite(const std::vector<Group>& groups) {
  SuiteResult s{"coverage"};
  for (const auto& g : groups) {
    auto t = coverage_table(g);
    for (const auto& v : check_coverage_table(g, t)) s.check(false, g.name() + ": " + v);
    s.check(true, g.name());
  }
  return s;
}

inline SuiteResult invariable_suite(const std::vector<Group>& groups, std::uint64_t seed) {
  SuiteResult s{"invariable-oracle"};
  std::uint64_t stream = 0;
  for (const auto& g : groups) {
    if (g.order() > oracle::kExhaustiveOrderCap) continue;
    auto t = coverage_table(g);
    TrialRng rng(seed, 0x100 + stream++);
    for (int i = 0; i < 100; ++i) {
      std::vector<Elem> xs(1 + rng.uniform(3));
      for (auto& x : xs) x = static_cast<Elem>(rng.uniform(g.order()));
      s.check(invariably_generates(t, xs) == oracle::invariably_generates_exhaustive(g, xs),
              g.name() + ": table and exhaustive test disagree");
    }
  }
  return s;
}

inline SuiteResult chebotarev_suite(const std::vector<Group>& groups) {
  SuiteResult s{"chebotarev"};
  for (const auto& g : groups) {
    auto ie = inclusion_exclusion(coverage_table(g));
    const auto c = chebotarev_exact(ie);
    Rational prev = p_invariable_exact(ie, 0), partial = 0;
    for (unsigned k = 0; k <= 400; ++k) {
      const auto pk = k == 0 ? prev : p_invariable_exact(ie, k);
      if (k <= 50) {
        s.check(pk >= prev, g.name() + ": P_I decreases at k = " + std::to_string(k));
        if (pk > 0) s.check(c * pk <= Rational(k), g.name() + ": C > k / P_I at k = " + std::to_string(k));
      }
      partial += 1 - pk;
      prev = pk;
    }
    Rational diff = c - partial;
    if (diff < 0) diff = -diff;
    s.check(diff <= waiting_time_tail_bound(ie, 401), g.name() + ": waiting-time identity");
    const Rational threshold(2, 9);
    const auto k = min_k_for_probability(ie, threshold);
    s.check(p_invariable_exact(ie, k) >= threshold && (k == 0 || p_invariable_exact(ie, k - 1) < threshold),
            g.name() + ": min_k is not least");
  }
  return s;
}

inline SuiteResult quotient_suite(const std::vector<Group>& groups) {
  SuiteResult s{"quotient-monotonicity"};
  for (const auto& g : groups) {
    if (g.order() > 200) continue;
    auto lat = subgroup_lattice(g);
    const auto c = chebotarev_exact(coverage_table(g, lat));
    for (const auto& n : normal_subgroups(lat)) {
      if (n.order() == 1) continue;
      auto q = quotient(g, n, &lat);
      s.check(chebotarev_exact(coverage_table(q.group)) <= c, g.name() + ": C(G/N) > C(G)");
    }
  }
  return s;
}

inline SuiteResult monte_carlo_suite(const std::vector<Group>& groups, std::uint64_t seed) {
  SuiteResult s{"monte-carlo"};
  for (const auto& g : groups) {
    auto t = coverage_table(g);
    const double exact = to_double(chebotarev_exact(t));
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 2 && !ok; ++attempt) {
      auto mc = chebotarev_montecarlo(t, 20000, seed + attempt);
      ok = mc.stderr_ == 0 ? mc.estimate == exact : std::abs(mc.estimate - exact) / mc.stderr_ < 4.0;
    }
    s.check(ok, g.name() + ": Monte Carlo more than 4 standard errors off");
  }
  return s;
}

/// corona on Frattini-trivial groups, random-subgroup sotto, relativo, order law.
inline SuiteResult crown_suite(const std::vector<Group>& groups, std::size_t sotto_runs, std::size_t relativo_runs,
                               std::uint64_t seed) {
  SuiteResult s{"crowns"};
  std::uint64_t stream = 0;
  for (const auto& g : groups) {
    auto ns = normal_structure(g);
    auto fwd = chief_series(ns);
    auto rev = chief_series(ns, true);
    for (std::size_t i = 0; i < fwd.size(); ++i)
      if (fwd[i].is_abelian && !fwd[i].is_frattini)
        s.check(abelian_crown(ns, fwd, i).delta == count_equivalent(rev, fwd[i]),
                g.name() + ": delta depends on the series");
    if (!frattini_trivial(ns) || g.order() > 500) continue;
    CrownData c;
    try {
      c = corona_decomposition(ns, fwd);
    } catch (const InvariantBreach& e) {
      s.check(false, g.name() + ": " + e.what());
      continue;
    }
    s.check(c.U && (c.U->members & c.R.members).count() == 1 &&
                product_set(g, c.U->members, c.R.members) == c.I.members,
            g.name() + ": I != R x U");
    TrialRng rng(seed, 0x200 + stream++);
    for (std::size_t i = 0; i < sotto_runs; ++i) {
      std::vector<Elem> gens(1 + rng.uniform(3));
      for (auto& x : gens) x = static_cast<Elem>(rng.uniform(g.order()));
      s.check(verify_sotto(g, c, closure(g, gens)), g.name() + ": sotto counterexample");
    }
    auto qu = quotient(g, *c.U, &ns.lattice);
    auto qr = quotient(g, c.R, &ns.lattice);
    auto tg = coverage_table(g), tu = coverage_table(qu.group), tr = coverage_table(qr.group);
    for (std::size_t i = 0; i < relativo_runs; ++i) {
      std::vector<Elem> xs(1 + rng.uniform(3)), xu, xr;
      for (auto& x : xs) {
        x = static_cast<Elem>(rng.uniform(g.order()));
        xu.push_back(qu(x));
        xr.push_back(qr(x));
      }
      if (invariably_generates(tu, xu) && invariably_generates(tr, xr))
        s.check(invariably_generates(tg, xs), g.name() + ": relativo counterexample");
    }
  }
  return s;
}

inline SuiteResult crown_power_suite() {
  SuiteResult s{"crown-powers"};
  for (auto l : {families::symmetric(3), families::symmetric(4), families::alternating(4), families::agl1(5)}) {
    auto a = monolith(l);
    for (std::size_t k = 1; k <= 3; ++k) {
      std::size_t ak = 1;
      for (std::size_t i = 0; i + 1 < k; ++i) ak *= a.order();
      if (ak * l.order() > 2000) break;
      s.check(build_crown_power_general(l, a, k).order() == ak * l.order(), l.name() + ": order law");
    }
  }
  for (auto& nm : module_battery()) {
    if (!nm.act.faithful) continue;
    std::size_t vu = 1;
    for (std::size_t u = 0; u <= 2; ++u, vu *= nm.act.module_order()) {
      if (vu > 256 || vu * nm.act.group.order() > 2000) break;
      s.check(build_crown_power_abelian(nm.act, u).order() == vu * nm.act.group.order(), nm.name + ": order law");
    }
  }
  return s;
}

inline SuiteResult binomial_suite() {
  SuiteResult s{"binomial"};
  std::vector<Rational> eps{Rational(1, 2), Rational(6, 7)};
  std::vector<Rational> ps{parse_rational("0.01"), parse_rational("0.05"), parse_rational("0.1"),
                           parse_rational("0.25"), parse_rational("0.5")};
  std::vector<std::uint64_t> ls;
  for (std::uint64_t l = 1; l <= 10; ++l) ls.push_back(l);
  for (const auto& r : binomial_check(eps, ps, ls))
    s.check(r.holds, "eps " + to_string(r.epsilon) + " p " + to_string(r.p) + " l " + std::to_string(r.l));
  return s;
}

inline SuiteResult criteria_suite(std::uint64_t seed) {
  SuiteResult s{"lift-criteria"};
  auto cv = cross_validate_criteria(module_battery(), 40, seed, 256);
  s.checked = cv.checked;
  s.violations = cv.disagreements;
  return s;
}

/// All suites; the report is a pure function of the seed.
inline nlohmann::json verify_props(std::uint64_t seed) {
  const auto groups = verify_groups();
  std::vector<SuiteResult> suites;
  suites.push_back(coverage_suite(groups));
  suites.push_back(invariable_suite(groups, seed));
  suites.push_back(chebotarev_suite(groups));
  suites.push_back(quotient_suite(groups));
  suites.push_back(monte_carlo_suite(groups, seed));
  suites.push_back(cohomology_suite());
  suites.push_back(criteria_suite(seed));
  suites.push_back(dimen_suite(300, seed));
  suites.push_back(crown_suite(groups, 200, 100, seed));
  suites.push_back(crown_power_suite());
  suites.push_back(binomial_suite());
  nlohmann::json report;
  report["seed"] = seed;
  report["suites"] = nlohmann::json::array();
  bool ok = true;
  for (const auto& s : suites) {
    report["suites"].push_back(s.to_json());
    ok = ok && s.ok();
  }
  report["ok"] = ok;
  return report;
}

}  // namespace invgen
