#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "invgen/bitset.hpp"
#include "invgen/errors.hpp"
#include "invgen/group.hpp"

namespace invgen {

struct SubgroupRecord {
  Bitset members;
  std::vector<Elem> generators;
  bool is_maximal = false;
  bool is_normal = false;

  std::size_t order() const { return members.count(); }
  bool contains(Elem x) const { return members.test(x); }
};

inline std::size_t index_in(const Group& g, const SubgroupRecord& h) { return g.order() / h.order(); }

inline bool precedes(const SubgroupRecord& a, const SubgroupRecord& b) {
  auto oa = a.order(), ob = b.order();
  if (oa != ob) return oa < ob;
  return members_less(a.members, b.members);
}

// ---------------------------------------------------------------------------
// Closures

/// Closure of S (given with a generating set) and one more element g. The
/// result is grown as a union of right cosets of S.
inline Bitset extend_subgroup(const Group& g, const Bitset& s, std::span<const Elem> s_gens, Elem x) {
  if (s.test(x)) return s;
  std::vector<Elem> s_elems;
  s_elems.reserve(s.count());
  s.for_each([&](std::size_t i) { s_elems.push_back(static_cast<Elem>(i)); });
  std::vector<Elem> gens(s_gens.begin(), s_gens.end());
  gens.push_back(x);
  Bitset result = s;
  std::vector<Elem> reps{Group::identity()};
  for (std::size_t pos = 0; pos < reps.size(); ++pos) {
    const Elem r = reps[pos];
    for (Elem t : gens) {
      const Elem y = g.mul(r, t);
      if (result.test(y)) continue;
      reps.push_back(y);
      for (Elem e : s_elems) result.set(g.mul(e, y));
    }
  }
  return result;
}

inline Bitset closure(const Group& g, std::span<const Elem> elems) {
  Bitset s = g.empty_set();
  s.set(Group::identity());
  std::vector<Elem> gens;
  for (Elem x : elems) {
    if (x >= g.order()) throw InputError("element index " + std::to_string(x) + " outside group");
    if (s.test(x)) continue;
    s = extend_subgroup(g, s, gens, x);
    gens.push_back(x);
  }
  return s;
}

/// Drops generators that are already implied by earlier ones.
inline std::vector<Elem> prune_generators(const Group& g, std::span<const Elem> elems) {
  Bitset s = g.empty_set();
  s.set(Group::identity());
  std::vector<Elem> gens;
  for (Elem x : elems) {
    if (s.test(x)) continue;
    s = extend_subgroup(g, s, gens, x);
    gens.push_back(x);
  }
  return gens;
}

inline SubgroupRecord generated_subgroup(const Group& g, std::span<const Elem> elems) {
  SubgroupRecord r;
  r.members = closure(g, elems);
  r.generators = prune_generators(g, elems);
  return r;
}

inline SubgroupRecord generated_subgroup(const Group& g, const std::vector<Permutation>& elems) {
  std::vector<Elem> idx;
  for (const auto& p : elems) idx.push_back(g.index_of(p));
  return generated_subgroup(g, std::span<const Elem>(idx));
}

/// Smallest generating subset found greedily from the members, in index order.
inline std::vector<Elem> generators_of(const Group& g, const Bitset& members) {
  Bitset s = g.empty_set();
  s.set(Group::identity());
  std::vector<Elem> gens;
  members.for_each([&](std::size_t i) {
    if (s.test(i)) return;
    s = extend_subgroup(g, s, gens, static_cast<Elem>(i));
    gens.push_back(static_cast<Elem>(i));
  });
  return gens;
}

inline SubgroupRecord subgroup_from_members(const Group& g, Bitset members) {
  SubgroupRecord r;
  r.generators = generators_of(g, members);
  r.members = std::move(members);
  return r;
}

inline SubgroupRecord trivial_subgroup(const Group& g) {
  SubgroupRecord r;
  r.members = g.empty_set();
  r.members.set(Group::identity());
  return r;
}

inline SubgroupRecord whole_group(const Group& g) {
  SubgroupRecord r;
  r.members = g.full_set();
  r.generators = prune_generators(g, g.generator_indices());
  r.is_normal = true;
  return r;
}

inline Bitset conjugate_set(const Group& g, const Bitset& s, Elem x) {
  Bitset out = g.empty_set();
  s.for_each([&](std::size_t i) { out.set(g.conj(static_cast<Elem>(i), x)); });
  return out;
}

inline bool is_normal_set(const Group& g, const Bitset& s) {
  for (Elem x : g.generator_indices()) {
    bool ok = true;
    s.for_each([&](std::size_t i) {
      if (ok && !s.test(g.conj(static_cast<Elem>(i), x))) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// Product set A*B of two subgroups, one of which normalises the other.
inline Bitset product_set(const Group& g, const Bitset& a, const Bitset& b) {
  auto ga = generators_of(g, a);
  auto gb = generators_of(g, b);
  std::vector<Elem> all(ga);
  all.insert(all.end(), gb.begin(), gb.end());
  return closure(g, all);
}

inline SubgroupRecord centralizer(const Group& g, std::span<const Elem> elems) {
  for (Elem x : elems)
    if (x >= g.order()) throw InputError("element index " + std::to_string(x) + " outside group");
  Bitset c = g.empty_set();
  for (Elem y = 0; y < g.order(); ++y) {
    bool commutes = true;
    for (Elem x : elems)
      if (g.mul(x, y) != g.mul(y, x)) {
        commutes = false;
        break;
      }
    if (commutes) c.set(y);
  }
  auto r = subgroup_from_members(g, std::move(c));
  r.is_normal = is_normal_set(g, r.members);
  return r;
}

/// Intersection of all G-conjugates of s.
inline Bitset core(const Group& g, const Bitset& s) {
  Bitset c = s;
  std::vector<Bitset> orbit{s};
  std::unordered_map<Bitset, bool, BitsetHash> seen{{s, true}};
  for (std::size_t pos = 0; pos < orbit.size(); ++pos)
    for (Elem x : g.generator_indices()) {
      auto t = conjugate_set(g, orbit[pos], x);
      if (seen.emplace(t, true).second) {
        c &= t;
        orbit.push_back(std::move(t));
      }
    }
  return c;
}

inline Bitset normal_closure(const Group& g, std::span<const Elem> elems) {
  std::vector<Elem> gens(elems.begin(), elems.end());
  Bitset s = closure(g, gens);
  while (!is_normal_set(g, s)) {
    std::vector<Elem> more;
    s.for_each([&](std::size_t i) {
      for (Elem x : g.generator_indices()) {
        Elem c = g.conj(static_cast<Elem>(i), x);
        if (!s.test(c)) more.push_back(c);
      }
    });
    gens.insert(gens.end(), more.begin(), more.end());
    s = closure(g, gens);
  }
  return s;
}

/// Subgroup generated by the commutators [a, b] = a^-1 b^-1 a b, a in A, b in B.
inline Bitset commutator_subgroup(const Group& g, const Bitset& a, const Bitset& b) {
  std::vector<Elem> comms;
  Bitset seen = g.empty_set();
  auto ga = generators_of(g, a);
  auto gb = generators_of(g, b);
  for (Elem x : ga)
    for (Elem y : gb) {
      Elem c = g.mul(g.mul(g.inv(x), g.inv(y)), g.mul(x, y));
      if (!seen.test(c)) {
        seen.set(c);
        comms.push_back(c);
      }
    }
  // when A and B are normal the normal closure of generator commutators is [A,B]
  return normal_closure(g, comms);
}

// ---------------------------------------------------------------------------
// Conjugacy classes

struct ConjClass {
  Elem representative = 0;
  std::size_t size = 0;
  Bitset members;
};

struct ConjugacyClasses {
  std::vector<ConjClass> classes;
  std::vector<std::uint32_t> class_of;  // element index -> class index

  std::size_t size() const { return classes.size(); }
};

/// Classes sorted by (size, representative index); representative is the
/// smallest element index in the class.
inline ConjugacyClasses conjugacy_classes(const Group& g) {
  const std::size_t n = g.order();
  std::vector<std::int64_t> label(n, -1);
  std::vector<ConjClass> raw;
  for (Elem e = 0; e < n; ++e) {
    if (label[e] >= 0) continue;
    ConjClass c;
    c.members = g.empty_set();
    c.representative = e;
    std::vector<Elem> orbit{e};
    label[e] = static_cast<std::int64_t>(raw.size());
    c.members.set(e);
    for (std::size_t pos = 0; pos < orbit.size(); ++pos)
      for (Elem x : g.generator_indices()) {
        Elem y = g.conj(orbit[pos], x);
        if (label[y] < 0) {
          label[y] = static_cast<std::int64_t>(raw.size());
          c.members.set(y);
          orbit.push_back(y);
        }
      }
    c.size = orbit.size();
    raw.push_back(std::move(c));
  }
  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (raw[a].size != raw[b].size) return raw[a].size < raw[b].size;
    return raw[a].representative < raw[b].representative;
  });
  ConjugacyClasses out;
  std::vector<std::uint32_t> remap(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    remap[order[i]] = static_cast<std::uint32_t>(i);
    out.classes.push_back(std::move(raw[order[i]]));
  }
  out.class_of.resize(n);
  for (Elem e = 0; e < n; ++e) out.class_of[e] = remap[static_cast<std::size_t>(label[e])];
  return out;
}

// ---------------------------------------------------------------------------
// Subgroup lattice

struct SubgroupLattice {
  std::vector<SubgroupRecord> subgroups;  // sorted by (order, member list)

  std::size_t size() const { return subgroups.size(); }
};

/// All subgroups by cyclic extension: every subgroup is reached from a smaller
/// one by adjoining an element of prime-power order.
inline SubgroupLattice subgroup_lattice(const Group& g) {
  const std::size_t cap = g.limits().max_lattice_order;
  if (g.order() > cap) throw CapExceeded("subgroup lattice", cap);

  std::vector<SubgroupRecord> list;
  std::unordered_map<Bitset, std::size_t, BitsetHash> where;
  auto add = [&](Bitset members, std::vector<Elem> gens) {
    auto [it, inserted] = where.emplace(members, list.size());
    if (!inserted) return;
    SubgroupRecord r;
    r.members = std::move(members);
    r.generators = std::move(gens);
    list.push_back(std::move(r));
  };

  add(trivial_subgroup(g).members, {});
  std::vector<Elem> prime_power_gens;
  Bitset covered = g.empty_set();
  for (Elem x = 1; x < g.order(); ++x) {
    if (covered.test(x)) continue;
    Elem one[] = {x};
    Bitset c = closure(g, one);
    const std::size_t n = c.count();
    // every generator of <x> gives the same subgroup
    for (std::size_t k = 1; k < n; ++k)
      if (std::gcd(k, n) == 1) covered.set(g.power(x, static_cast<long long>(k)));
    std::size_t m = n;
    std::size_t p = 2;
    while (p * p <= m && m % p) ++p;
    if (p * p > m) p = m;
    while (m % p == 0) m /= p;
    if (m == 1) prime_power_gens.push_back(x);
    add(std::move(c), {x});
  }

  for (std::size_t i = 0; i < list.size(); ++i) {
    for (Elem c : prime_power_gens) {
      if (list[i].members.test(c)) continue;
      Bitset t = extend_subgroup(g, list[i].members, list[i].generators, c);
      if (where.count(t)) continue;
      auto gens = list[i].generators;
      gens.push_back(c);
      add(std::move(t), std::move(gens));
    }
  }

  std::sort(list.begin(), list.end(), precedes);
  const std::size_t n = g.order();
  for (auto& s : list) s.is_normal = is_normal_set(g, s.members);
  for (std::size_t i = 0; i < list.size(); ++i) {
    auto& s = list[i];
    if (s.order() == n) continue;
    bool maximal = true;
    for (std::size_t j = i + 1; j < list.size() && maximal; ++j) {
      const auto& t = list[j];
      auto ot = t.order();
      if (ot == n || ot == s.order()) continue;
      if (ot % s.order() == 0 && s.members.is_subset_of(t.members)) maximal = false;
    }
    s.is_maximal = maximal;
  }
  return {std::move(list)};
}

struct MaximalClass {
  SubgroupRecord representative;
  std::size_t conjugates = 0;
};

inline std::vector<SubgroupRecord> maximal_subgroups(const SubgroupLattice& lat) {
  std::vector<SubgroupRecord> out;
  for (const auto& s : lat.subgroups)
    if (s.is_maximal) out.push_back(s);
  return out;
}

/// One representative per conjugacy class of maximal subgroups, ordered by
/// decreasing order and then by member list. The representative is the
/// smallest conjugate in member-list order.
inline std::vector<MaximalClass> maximal_subgroups_up_to_conjugacy(const Group& g,
                                                                   const SubgroupLattice& lat) {
  auto maxes = maximal_subgroups(lat);
  std::unordered_map<Bitset, std::size_t, BitsetHash> pos;
  for (std::size_t i = 0; i < maxes.size(); ++i) pos.emplace(maxes[i].members, i);
  std::vector<bool> done(maxes.size(), false);
  std::vector<MaximalClass> out;
  for (std::size_t i = 0; i < maxes.size(); ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> orbit{i};
    done[i] = true;
    for (std::size_t k = 0; k < orbit.size(); ++k)
      for (Elem x : g.generator_indices()) {
        auto t = conjugate_set(g, maxes[orbit[k]].members, x);
        auto j = pos.at(t);
        if (!done[j]) {
          done[j] = true;
          orbit.push_back(j);
        }
      }
    std::size_t best = orbit[0];
    for (auto j : orbit)
      if (members_less(maxes[j].members, maxes[best].members)) best = j;
    out.push_back({maxes[best], orbit.size()});
  }
  std::sort(out.begin(), out.end(), [](const MaximalClass& a, const MaximalClass& b) {
    auto oa = a.representative.order(), ob = b.representative.order();
    if (oa != ob) return oa > ob;
    return members_less(a.representative.members, b.representative.members);
  });
  return out;
}

inline std::vector<MaximalClass> maximal_subgroups_up_to_conjugacy(const Group& g) {
  return maximal_subgroups_up_to_conjugacy(g, subgroup_lattice(g));
}

inline std::vector<SubgroupRecord> normal_subgroups(const SubgroupLattice& lat) {
  std::vector<SubgroupRecord> out;
  for (const auto& s : lat.subgroups)
    if (s.is_normal) out.push_back(s);
  return out;
}

inline std::vector<SubgroupRecord> normal_subgroups(const Group& g) {
  return normal_subgroups(subgroup_lattice(g));
}

inline SubgroupRecord frattini(const Group& g, const SubgroupLattice& lat) {
  Bitset f = g.full_set();
  for (const auto& s : lat.subgroups)
    if (s.is_maximal) f &= s.members;
  auto r = subgroup_from_members(g, std::move(f));
  r.is_normal = true;
  r.is_maximal = false;
  return r;
}

inline SubgroupRecord frattini(const Group& g) { return frattini(g, subgroup_lattice(g)); }

// ---------------------------------------------------------------------------
// Quotients

struct QuotientMap {
  Group group;
  std::vector<Elem> image;  // element of G -> element of G/N
  Bitset kernel;

  Elem operator()(Elem x) const { return image[x]; }
};

/// G/N acting on the right cosets of a subgroup K >= N with core N. With a
/// lattice the largest such K is used; otherwise K = N (regular action).
inline QuotientMap quotient(const Group& g, const Bitset& n, const SubgroupLattice* lat = nullptr) {
  if (!n.test(Group::identity()) || !is_normal_set(g, n) || closure(g, generators_of(g, n)) != n)
    throw PreconditionError("quotient: subgroup is not normal");
  Bitset k = n;
  if (lat) {
    for (auto it = lat->subgroups.rbegin(); it != lat->subgroups.rend(); ++it) {
      const auto& s = *it;
      if (!n.is_subset_of(s.members)) continue;
      if (core(g, s.members) == n) {
        k = s.members;
        break;
      }
    }
  }
  const std::size_t order = g.order();
  const std::size_t ncos = order / k.count();
  if (ncos > g.limits().max_degree) throw CapExceeded("degree", g.limits().max_degree);
  std::vector<std::uint32_t> coset_of(order, UINT32_MAX);
  std::vector<Elem> rep;
  auto k_elems = k.indices();
  for (Elem x = 0; x < order; ++x) {
    if (coset_of[x] != UINT32_MAX) continue;
    auto id = static_cast<std::uint32_t>(rep.size());
    rep.push_back(x);
    for (auto y : k_elems) coset_of[g.mul(static_cast<Elem>(y), x)] = id;
  }
  auto action = [&](Elem y) {
    std::vector<int> img(ncos);
    for (std::size_t c = 0; c < ncos; ++c) img[c] = static_cast<int>(coset_of[g.mul(rep[c], y)]);
    return Permutation::from_images(img);
  };
  std::vector<Permutation> gens;
  for (Elem s : g.generator_indices()) gens.push_back(action(s));
  QuotientMap q;
  q.group = Group::from_generators(g.name() + "/N", ncos, std::move(gens), g.limits());
  q.image.resize(order);
  for (Elem y = 0; y < order; ++y) q.image[y] = q.group.index_of(action(y));
  q.kernel = n;
  if (q.group.order() * n.count() != order)
    throw InvariantBreach("quotient order mismatch: core of the coset stabiliser is not N");
  return q;
}

inline QuotientMap quotient(const Group& g, const SubgroupRecord& n, const SubgroupLattice* lat = nullptr) {
  return quotient(g, n.members, lat);
}

/// Preimage of a subset of G/N.
inline Bitset preimage(const QuotientMap& q, const Bitset& s) {
  Bitset out(q.image.size());
  for (std::size_t x = 0; x < q.image.size(); ++x)
    if (s.test(q.image[x])) out.set(x);
  return out;
}

}  // namespace invgen
