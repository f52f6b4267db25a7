#pragma once

// Reference implementations that follow definitions literally. They are slow
// and only meant for cross-checking the fast paths at small orders.

#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "invgen/errors.hpp"
#include "invgen/group.hpp"
#include "invgen/subgroups.hpp"

namespace invgen::oracle {

inline constexpr std::size_t kExhaustiveOrderCap = 200;

inline std::vector<Elem> conjugates_of(const Group& g, Elem x) {
  std::set<Elem> s;
  for (Elem y = 0; y < g.order(); ++y) s.insert(g.conj(x, y));
  return {s.begin(), s.end()};
}

/// Every choice of conjugates generates G. The first element's conjugate is
/// fixed, since conjugating the whole tuple does not change what it generates.
/// No size cap; the cost is one closure per conjugate choice.
inline bool invariably_generates_literal(const Group& g, std::span<const Elem> gs) {
  for (Elem x : gs)
    if (x >= g.order()) throw InputError("element index outside group");
  if (gs.empty()) return g.order() == 1;
  std::vector<std::vector<Elem>> choices;
  choices.push_back({gs[0]});
  for (std::size_t i = 1; i < gs.size(); ++i) choices.push_back(conjugates_of(g, gs[i]));
  std::vector<std::size_t> pos(gs.size(), 0);
  std::vector<Elem> tuple(gs.size());
  while (true) {
    for (std::size_t i = 0; i < gs.size(); ++i) tuple[i] = choices[i][pos[i]];
    if (closure(g, tuple).count() != g.order()) return false;
    std::size_t i = 0;
    while (i < pos.size() && ++pos[i] == choices[i].size()) pos[i++] = 0;
    if (i == pos.size()) return true;
  }
}

inline bool invariably_generates_exhaustive(const Group& g, std::span<const Elem> gs) {
  if (g.order() > kExhaustiveOrderCap) throw CapExceeded("exhaustive invariable test", kExhaustiveOrderCap);
  return invariably_generates_literal(g, gs);
}

/// Invariable generation through the maximal subgroups themselves (all of
/// them, not class representatives): some maximal M meets every conjugacy
/// class of the tuple. Usable above the exhaustive cap.
inline bool invariably_generates_via_all_maximals(const Group& g, const SubgroupLattice& lat,
                                                  std::span<const Elem> gs) {
  auto maxes = maximal_subgroups(lat);
  if (maxes.empty()) return true;
  std::vector<std::vector<Elem>> classes;
  for (Elem x : gs) classes.push_back(conjugates_of(g, x));
  for (const auto& m : maxes) {
    bool all = true;
    for (const auto& cls : classes) {
      bool hit = false;
      for (Elem y : cls)
        if (m.members.test(y)) {
          hit = true;
          break;
        }
      if (!hit) {
        all = false;
        break;
      }
    }
    if (all) return false;
  }
  return true;
}

}  // namespace invgen::oracle
