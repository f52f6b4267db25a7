#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "invgen/errors.hpp"
#include "invgen/gf.hpp"
#include "invgen/group.hpp"
#include "invgen/modlin.hpp"
#include "invgen/semidirect.hpp"
#include "invgen/subgroups.hpp"

namespace invgen {

// Normal subgroups and maximal subgroups of G, both read off the lattice.
struct NormalStructure {
  Group group;
  std::vector<SubgroupRecord> normals;  // sorted by (order, member list)
  std::vector<SubgroupRecord> maximals;
  SubgroupLattice lattice;
};

inline NormalStructure normal_structure(const Group& g) {
  auto lat = subgroup_lattice(g);
  auto normals = normal_subgroups(lat);
  auto maximals = maximal_subgroups(lat);
  return {g, std::move(normals), std::move(maximals), std::move(lat)};
}

/// Intersection of the maximal subgroups containing N; N <= result, and
/// result / N is the Frattini subgroup of G / N.
inline Bitset frattini_over(const NormalStructure& ns, const Bitset& n) {
  Bitset f = ns.group.full_set();
  for (const auto& m : ns.maximals)
    if (n.is_subset_of(m.members)) f &= m.members;
  return f;
}

/// Normal subgroups M of G minimal subject to N < M.
inline std::vector<SubgroupRecord> minimal_normals_over(const NormalStructure& ns, const Bitset& n) {
  std::vector<const SubgroupRecord*> above;
  for (const auto& m : ns.normals)
    if (m.members != n && n.is_subset_of(m.members)) above.push_back(&m);
  std::vector<SubgroupRecord> out;
  for (const auto* m : above) {
    bool minimal = true;
    for (const auto* k : above)
      if (k->order() < m->order() && k->members.is_subset_of(m->members)) {
        minimal = false;
        break;
      }
    if (minimal) out.push_back(*m);
  }
  return out;
}

inline bool is_abelian_section(const Group& g, const Bitset& x, const Bitset& y) {
  return commutator_subgroup(g, x, x).is_subset_of(y);
}

/// C_G(X/Y) = {g : [x, g] in Y for all x in X}.
inline Bitset factor_centralizer(const Group& g, const Bitset& x, const Bitset& y) {
  const auto xg = generators_of(g, x);
  Bitset c = g.empty_set();
  for (Elem h = 0; h < g.order(); ++h) {
    bool ok = true;
    for (Elem a : xg)
      if (!y.test(g.mul(g.inv(a), g.conj(a, h)))) {
        ok = false;
        break;
      }
    if (ok) c.set(h);
  }
  return c;
}

/// Conjugation action of G on an elementary abelian section X/Y, in
/// coordinates x_1^{c_1} ... x_k^{c_k} Y.
inline ModuleAction factor_module(const Group& g, const Bitset& x, const Bitset& y) {
  if (!is_abelian_section(g, x, y)) throw PreconditionError("factor_module: section is not abelian");
  const std::size_t size = x.count() / y.count();
  if (size < 2) throw PreconditionError("factor_module: trivial section");
  int p = 2;
  while (size % static_cast<std::size_t>(p)) ++p;
  std::size_t k = 0;
  for (std::size_t s = size; s > 1; s /= static_cast<std::size_t>(p)) {
    if (s % static_cast<std::size_t>(p)) throw PreconditionError("factor_module: section is not elementary abelian");
    ++k;
  }
  // Basis elements x_i chosen greedily, each outside the span of Y and the previous ones.
  std::vector<Elem> basis;
  Bitset span = y;
  std::vector<Elem> span_gens = generators_of(g, y);
  for (auto i : x.indices()) {
    const auto e = static_cast<Elem>(i);
    if (span.test(e)) continue;
    span = extend_subgroup(g, span, span_gens, e);
    span_gens.push_back(e);
    basis.push_back(e);
  }
  if (basis.size() != k) throw InvariantBreach("factor_module: section basis has wrong length");
  std::vector<std::uint32_t> code_of(g.order(), UINT32_MAX);
  const auto y_elems = y.indices();
  for (std::size_t c = 0; c < size; ++c) {
    auto v = decode_vector(c, p, k);
    Elem e = Group::identity();
    for (std::size_t i = 0; i < k; ++i) e = g.mul(e, g.power(basis[i], v[i]));
    for (auto t : y_elems) code_of[g.mul(static_cast<Elem>(t), e)] = static_cast<std::uint32_t>(c);
  }
  std::vector<GFMatrix> mats;
  for (Elem s : g.generator_indices()) {
    GFMatrix m(p, k, k);
    for (std::size_t i = 0; i < k; ++i) {
      auto row = decode_vector(code_of[g.conj(basis[i], s)], p, k);
      for (std::size_t j = 0; j < k; ++j) m(i, j) = row[j];
    }
    mats.push_back(std::move(m));
  }
  return make_module_action(g, p, std::move(mats));
}

/// dim Hom_G(A, B) over GF(p) for two actions of the same group.
inline std::size_t module_hom_dim(const ModuleAction& a, const ModuleAction& b) {
  if (a.p != b.p) return 0;
  const int p = a.p;
  const std::size_t da = a.dim, db = b.dim, nv = da * db, ne = da * db;
  const std::size_t ng = a.gen_images.size();
  // X is da x db, flattened row-major; per generator the block holds M^A X - X M^B.
  GFMatrix sys(p, nv, std::max<std::size_t>(1, ng) * ne);
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& ma = a.gen_images[g];
    const auto& mb = b.gen_images[g];
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t k = 0; k < db; ++k) {
        const std::size_t var = i * db + k;  // X(i,k)
        for (std::size_t r = 0; r < da; ++r)  // (M^A X)(r,k) += M^A(r,i) X(i,k)
          sys(var, g * ne + r * db + k) = mod_p(sys(var, g * ne + r * db + k) + ma(r, i), p);
        for (std::size_t j = 0; j < db; ++j)  // (X M^B)(i,j) += X(i,k) M^B(k,j)
          sys(var, g * ne + i * db + j) = mod_p(sys(var, g * ne + i * db + j) - mb(k, j), p);
      }
  }
  return left_kernel(sys).size();
}

/// Irreducible modules: G-isomorphic iff a nonzero homomorphism exists.
inline bool g_isomorphic(const ModuleAction& a, const ModuleAction& b) {
  return a.p == b.p && a.dim == b.dim && module_hom_dim(a, b) > 0;
}

// ---------------------------------------------------------------------------
// Chief series

struct ChiefFactor {
  SubgroupRecord upper, lower;
  std::size_t order = 0;
  bool is_abelian = false;
  bool is_frattini = false;
  Bitset centralizer;                  // C_G(upper / lower)
  std::optional<ModuleAction> action;  // abelian factors only
};

inline ChiefFactor make_chief_factor(const NormalStructure& ns, const SubgroupRecord& upper,
                                     const SubgroupRecord& lower) {
  const auto& g = ns.group;
  ChiefFactor f;
  f.upper = upper;
  f.lower = lower;
  f.order = upper.order() / lower.order();
  f.is_abelian = is_abelian_section(g, upper.members, lower.members);
  f.is_frattini = f.is_abelian && upper.members.is_subset_of(frattini_over(ns, lower.members));
  f.centralizer = factor_centralizer(g, upper.members, lower.members);
  if (f.is_abelian) f.action = factor_module(g, upper.members, lower.members);
  return f;
}

/// Bottom-up chief series. Top-down, each step takes the largest normal
/// subgroup inside the current one; ties go to the first (or, with
/// reverse_ties, the last) member list.
inline std::vector<ChiefFactor> chief_series(const NormalStructure& ns, bool reverse_ties = false) {
  std::vector<SubgroupRecord> chain{ns.normals.back()};
  while (chain.back().order() > 1) {
    const auto& top = chain.back().members;
    const SubgroupRecord* best = nullptr;
    for (const auto& n : ns.normals) {
      if (n.members == top || !n.members.is_subset_of(top)) continue;
      if (!best || n.order() > best->order() || (reverse_ties && n.order() == best->order())) best = &n;
    }
    chain.push_back(*best);
  }
  std::vector<ChiefFactor> out;
  for (std::size_t i = chain.size() - 1; i > 0; --i) out.push_back(make_chief_factor(ns, chain[i - 1], chain[i]));
  return out;
}

inline std::vector<ChiefFactor> chief_series(const Group& g) { return chief_series(normal_structure(g)); }

/// G-equivalence of two non-Frattini chief factors. For abelian factors this
/// is G-isomorphism. For nonabelian factors only equal centralizers are
/// decided (then the identity on G/C is the required isomorphism); any other
/// pair of same-size nonabelian factors is out of scope.
inline bool g_equivalent(const ChiefFactor& a, const ChiefFactor& b) {
  if (a.is_abelian != b.is_abelian || a.order != b.order) return false;
  if (a.is_abelian) return g_isomorphic(*a.action, *b.action);
  if (a.centralizer == b.centralizer) return true;
  if (a.centralizer.count() != b.centralizer.count()) return false;
  throw PreconditionError("G-equivalence of nonabelian chief factors with different centralizers is not implemented");
}

inline std::size_t count_equivalent(const std::vector<ChiefFactor>& series, const ChiefFactor& a) {
  std::size_t n = 0;
  for (const auto& f : series)
    if (!f.is_frattini && g_equivalent(f, a)) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Crowns

struct CrownData {
  std::size_t factor = 0;  // position in the chief series it was computed from
  std::size_t delta = 0;
  SubgroupRecord R, I;
  std::optional<SubgroupRecord> U;
};

/// Normal N with G/N monolithic, socle M/N non-Frattini and G-equivalent to A.
/// For abelian A this is exactly G/N = L_A with soc(G/N) ~ A.
inline std::vector<SubgroupRecord> crown_kernels(const NormalStructure& ns, const ChiefFactor& a) {
  const auto& g = ns.group;
  std::vector<SubgroupRecord> out;
  for (const auto& n : ns.normals) {
    if (n.order() == g.order()) continue;
    auto mins = minimal_normals_over(ns, n.members);
    if (mins.size() != 1) continue;
    const auto& m = mins[0];
    if (m.order() / n.order() != a.order) continue;
    const bool ab = is_abelian_section(g, m.members, n.members);
    if (ab != a.is_abelian) continue;
    if (ab) {
      if (m.members.is_subset_of(frattini_over(ns, n.members))) continue;
      if (!g_isomorphic(factor_module(g, m.members, n.members), *a.action)) continue;
    } else {
      if (g.order() / n.order() != g.order() / a.centralizer.count()) continue;
      if (n.members != a.centralizer)
        throw PreconditionError("nonabelian crown: quotient of the same shape with a different kernel; "
                                "G-equivalence for it is not implemented");
    }
    out.push_back(n);
  }
  return out;
}

inline CrownData crown(const NormalStructure& ns, const std::vector<ChiefFactor>& series, std::size_t index) {
  const auto& g = ns.group;
  const auto& a = series.at(index);
  if (a.is_frattini) throw PreconditionError("crown: Frattini chief factor");
  auto kernels = crown_kernels(ns, a);
  if (kernels.empty()) throw InvariantBreach("crown: no quotient realises L_A for a non-Frattini factor");
  Bitset r = g.full_set();
  for (const auto& n : kernels) r &= n.members;
  CrownData c;
  c.factor = index;
  c.R = subgroup_from_members(g, r);
  c.R.is_normal = true;
  Bitset soc = r;
  for (const auto& m : minimal_normals_over(ns, r)) {
    soc = product_set(g, soc, m.members);
    if (m.order() / c.R.order() != a.order)
      throw InvariantBreach("crown: minimal normal subgroup of G/R of the wrong size");
    if (a.is_abelian) {
      if (!is_abelian_section(g, m.members, r) || !g_isomorphic(factor_module(g, m.members, r), *a.action))
        throw InvariantBreach("crown: minimal normal subgroup of G/R not G-equivalent to A");
    }
  }
  c.I = subgroup_from_members(g, soc);
  c.I.is_normal = true;
  std::size_t q = c.I.order() / c.R.order();
  while (q > 1) {
    if (q % a.order) throw InvariantBreach("crown: |I/R| is not a power of |A|");
    q /= a.order;
    ++c.delta;
  }
  if (c.delta != count_equivalent(series, a))
    throw InvariantBreach("crown: delta " + std::to_string(c.delta) + " differs from the chief series count " +
                          std::to_string(count_equivalent(series, a)));
  return c;
}

inline CrownData abelian_crown(const NormalStructure& ns, const std::vector<ChiefFactor>& series,
                               std::size_t index) {
  if (!series.at(index).is_abelian) throw PreconditionError("abelian_crown: nonabelian chief factor");
  return crown(ns, series, index);
}

/// A crown with a nontrivial normal U such that I = R x U. Crowns are tried
/// in chief-series order, one per equivalence class; nonabelian classes
/// outside the decided range are skipped.
inline CrownData corona_decomposition(const NormalStructure& ns, const std::vector<ChiefFactor>& series) {
  const auto& g = ns.group;
  if (frattini_over(ns, trivial_subgroup(g).members).count() != 1)
    throw PreconditionError("corona_decomposition: Frattini subgroup is not trivial");
  if (g.is_trivial()) throw PreconditionError("corona_decomposition: trivial group");
  std::vector<std::size_t> tried;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].is_frattini) continue;
    bool seen = false;
    try {
      for (auto j : tried) seen = seen || g_equivalent(series[j], series[i]);
    } catch (const PreconditionError&) {
      continue;
    }
    if (seen) continue;
    tried.push_back(i);
    CrownData c;
    try {
      c = crown(ns, series, i);
    } catch (const PreconditionError&) {
      continue;
    }
    for (const auto& u : ns.normals) {
      if (u.order() == 1 || !u.members.is_subset_of(c.I.members)) continue;
      if (u.order() * c.R.order() != c.I.order()) continue;
      if ((u.members & c.R.members).count() != 1) continue;
      c.U = u;
      return c;
    }
  }
  throw InvariantBreach("corona_decomposition: no complement found");
}

/// (KU = G and KR = G) implies K = G.
inline bool verify_sotto(const Group& g, const CrownData& c, const Bitset& k) {
  if (!c.U) throw PreconditionError("verify_sotto: crown has no U");
  auto product_order = [&](const Bitset& a, const Bitset& b) { return a.count() * b.count() / (a & b).count(); };
  const bool ku = product_order(k, c.U->members) == g.order();
  const bool kr = product_order(k, c.R.members) == g.order();
  return !(ku && kr) || k.count() == g.order();
}

// ---------------------------------------------------------------------------
// Crown-based powers

/// V^u x| H with diagonal H-action; u = 0 gives H.
inline Group build_crown_power_abelian(const ModuleAction& act, std::size_t u, const Limits& limits = {}) {
  if (u == 0) return act.group;
  if (!act.faithful) throw PreconditionError("crown power: the action of H must be faithful");
  const auto vu = checked_power(act.module_order(), u, limits.max_order, "crown power order");
  if (vu * act.group.order() > limits.max_order) throw CapExceeded("group order", limits.max_order);
  return AffineLift(act, u).group(limits);
}

/// {(l_1, ..., l_k) in L^k : l_1 = ... = l_k mod A} on k copies of L's domain.
inline Group build_crown_power_general(const Group& l, const SubgroupRecord& a, std::size_t k,
                                       const Limits& limits = {}) {
  if (k == 0) throw PreconditionError("crown power: k must be positive");
  auto ns = normal_structure(l);
  auto mins = minimal_normals_over(ns, trivial_subgroup(l).members);
  if (mins.size() != 1 || mins[0].members != a.members)
    throw PreconditionError("crown power: A is not the unique minimal normal subgroup of L");
  const auto ak = checked_power(a.order(), k, limits.max_order, "crown power order");
  if (ak / a.order() > limits.max_order / l.order()) throw CapExceeded("group order", limits.max_order);
  const std::size_t n = l.degree();
  if (k * n > kMaxStorableDegree) throw CapExceeded("degree", kMaxStorableDegree);
  auto place = [&](const std::vector<std::pair<std::size_t, Elem>>& parts) {
    std::vector<int> img(k * n);
    for (std::size_t i = 0; i < k * n; ++i) img[i] = static_cast<int>(i);
    for (auto [c, e] : parts) {
      auto im = l.images(e);
      for (std::size_t x = 0; x < n; ++x) img[c * n + x] = static_cast<int>(c * n + im[x]);
    }
    return Permutation::from_images(img);
  };
  std::vector<Permutation> gens;
  for (Elem s : l.generator_indices()) {
    std::vector<std::pair<std::size_t, Elem>> diag;
    for (std::size_t c = 0; c < k; ++c) diag.emplace_back(c, s);
    gens.push_back(place(diag));
  }
  for (std::size_t c = 1; c < k; ++c)
    for (Elem s : a.generators) gens.push_back(place({{c, s}}));
  Limits lim = limits;
  lim.max_degree = kMaxStorableDegree;
  auto g = Group::from_generators(l.name() + "_" + std::to_string(k), k * n, std::move(gens), lim);
  if (g.order() != ak / a.order() * l.order()) throw InvariantBreach("crown power: order law fails");
  return g;
}

/// The unique minimal normal subgroup of a monolithic group.
inline SubgroupRecord monolith(const Group& l) {
  auto ns = normal_structure(l);
  auto mins = minimal_normals_over(ns, trivial_subgroup(l).members);
  if (mins.size() != 1) throw PreconditionError("group is not monolithic");
  return mins[0];
}

}  // namespace invgen
