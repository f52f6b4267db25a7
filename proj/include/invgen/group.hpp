#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgen/bitset.hpp"
#include "invgen/errors.hpp"
#include "invgen/perm.hpp"

namespace invgen {

using Elem = std::uint32_t;

struct Limits {
  std::size_t max_order = 100000;
  std::size_t max_degree = 64;
  std::size_t max_lattice_order = 2000;
  /// Groups up to this order carry a full Cayley table.
  std::size_t max_table_order = 2048;
};

// A finite permutation group with every element enumerated. Elements are
// addressed by their index in the lexicographic order of image sequences, so
// the identity is always index 0. Immutable; copies share state.
class Group {
public:
  Group() = default;

  static Group from_generators(std::string name, std::size_t degree,
                               std::vector<Permutation> generators, const Limits& limits = {}) {
    if (degree == 0) throw InputError("group degree must be positive");
    if (degree > limits.max_degree) throw CapExceeded("degree", limits.max_degree);
    if (degree > kMaxStorableDegree) throw CapExceeded("degree", kMaxStorableDegree);
    for (const auto& g : generators)
      if (g.degree() != degree)
        throw InputError("generator degree " + std::to_string(g.degree()) +
                         " does not match group degree " + std::to_string(degree));
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->degree = degree;
    impl->limits = limits;
    impl->generators = std::move(generators);
    enumerate(*impl);
    return Group(std::move(impl));
  }

  const std::string& name() const { return impl_->name; }
  std::size_t degree() const { return impl_->degree; }
  std::size_t order() const { return impl_->order; }
  const Limits& limits() const { return impl_->limits; }
  bool is_trivial() const { return impl_->order == 1; }

  const std::vector<Permutation>& generators() const { return impl_->generators; }
  /// Element indices of the generators, in descriptor order.
  const std::vector<Elem>& generator_indices() const { return impl_->generator_index; }

  static constexpr Elem identity() { return 0; }

  std::span<const Point> images(Elem i) const {
    return {impl_->flat.data() + static_cast<std::size_t>(i) * impl_->degree, impl_->degree};
  }

  Permutation element(Elem i) const {
    auto im = images(i);
    std::vector<int> v(im.begin(), im.end());
    return Permutation::from_images(v);
  }

  std::optional<Elem> find(const Permutation& p) const {
    if (p.degree() != impl_->degree) return std::nullopt;
    auto it = impl_->index.find(p.key());
    if (it == impl_->index.end()) return std::nullopt;
    return it->second;
  }

  Elem index_of(const Permutation& p) const {
    auto i = find(p);
    if (!i) throw InputError("element " + p.cycle_string() + " is not in " + impl_->name);
    return *i;
  }

  bool has_table() const { return !impl_->table.empty(); }

  /// a first, then b.
  Elem mul(Elem a, Elem b) const {
    if (has_table()) return impl_->table[static_cast<std::size_t>(a) * impl_->order + b];
    std::string key(impl_->degree, '\0');
    auto ia = images(a);
    auto ib = images(b);
    for (std::size_t x = 0; x < impl_->degree; ++x) key[x] = static_cast<char>(ib[ia[x]]);
    return impl_->index.at(key);
  }

  Elem inv(Elem a) const { return impl_->inverse[a]; }

  /// x^-1 g x
  Elem conj(Elem g, Elem x) const { return mul(mul(inv(x), g), x); }

  Elem power(Elem g, long long e) const {
    if (e < 0) {
      g = inv(g);
      e = -e;
    }
    Elem r = identity();
    Elem b = g;
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }

  std::size_t element_order(Elem g) const {
    std::size_t k = 1;
    Elem x = g;
    while (x != identity()) {
      x = mul(x, g);
      ++k;
    }
    return k;
  }

  Bitset empty_set() const { return Bitset(impl_->order); }
  Bitset full_set() const {
    Bitset b(impl_->order);
    b.set_all();
    return b;
  }

  /// Sorted 1-based generator image lists; the identity key for caching.
  std::string canonical() const {
    std::vector<std::vector<int>> gens;
    for (const auto& g : impl_->generators) gens.push_back(g.one_based());
    std::sort(gens.begin(), gens.end());
    nlohmann::json j{{"degree", impl_->degree}, {"generators", gens}};
    return j.dump();
  }

  friend bool same_group(const Group& a, const Group& b) { return a.impl_ == b.impl_; }

private:
  struct Impl {
    std::string name;
    std::size_t degree = 0;
    Limits limits;
    std::vector<Permutation> generators;
    std::vector<Elem> generator_index;
    std::size_t order = 0;
    std::vector<Point> flat;
    std::unordered_map<std::string, Elem> index;
    std::vector<Elem> inverse;
    std::vector<Elem> table;
  };

  explicit Group(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static void enumerate(Impl& g) {
    const std::size_t n = g.degree;
    const std::size_t ngen = g.generators.size();
    std::vector<std::string> keys;
    std::unordered_map<std::string, std::uint32_t> seen;
    keys.push_back(Permutation::identity(n).key());
    seen.emplace(keys.back(), 0);
    // right multiplication by generators, recorded in BFS numbering
    std::vector<std::uint32_t> rmul;
    for (std::size_t pos = 0; pos < keys.size(); ++pos) {
      for (std::size_t s = 0; s < ngen; ++s) {
        const auto& gim = g.generators[s].images();
        std::string k(n, '\0');
        const std::string& cur = keys[pos];
        for (std::size_t x = 0; x < n; ++x)
          k[x] = static_cast<char>(gim[static_cast<unsigned char>(cur[x])]);
        auto [it, inserted] = seen.emplace(k, static_cast<std::uint32_t>(keys.size()));
        if (inserted) {
          if (keys.size() >= g.limits.max_order) throw CapExceeded("group order", g.limits.max_order);
          keys.push_back(std::move(k));
        }
        rmul.push_back(it->second);
      }
    }
    const std::size_t order = keys.size();
    std::vector<std::uint32_t> perm(order);
    for (std::size_t i = 0; i < order; ++i) perm[i] = static_cast<std::uint32_t>(i);
    std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
    std::vector<Elem> bfs_to_lex(order);
    for (std::size_t i = 0; i < order; ++i) bfs_to_lex[perm[i]] = static_cast<Elem>(i);

    g.order = order;
    g.flat.resize(order * n);
    g.index.reserve(order);
    for (std::size_t i = 0; i < order; ++i) {
      const std::string& k = keys[perm[i]];
      for (std::size_t x = 0; x < n; ++x) g.flat[i * n + x] = static_cast<Point>(k[x]);
      g.index.emplace(k, static_cast<Elem>(i));
    }
    for (const auto& gen : g.generators) g.generator_index.push_back(g.index.at(gen.key()));

    g.inverse.resize(order);
    for (std::size_t i = 0; i < order; ++i) {
      std::string k(n, '\0');
      for (std::size_t x = 0; x < n; ++x) k[g.flat[i * n + x]] = static_cast<char>(x);
      g.inverse[i] = g.index.at(k);
    }

    if (order <= g.limits.max_table_order) {
      // Row a of the table by walking the BFS tree: a*(b*s) = (a*b)*s.
      std::vector<Elem> rmul_lex(order * ngen);
      for (std::size_t b = 0; b < order; ++b)
        for (std::size_t s = 0; s < ngen; ++s)
          rmul_lex[bfs_to_lex[b] * ngen + s] = bfs_to_lex[rmul[b * ngen + s]];
      // BFS tree: first discovery of each element.
      std::vector<std::uint32_t> parent(order, 0), via(order, 0);
      std::vector<bool> found(order, false);
      found[0] = true;
      std::vector<std::uint32_t> bfs_order{0};
      for (std::size_t pos = 0; pos < bfs_order.size(); ++pos) {
        auto b = bfs_order[pos];
        for (std::size_t s = 0; s < ngen; ++s) {
          auto c = rmul[b * ngen + s];
          if (!found[c]) {
            found[c] = true;
            parent[c] = b;
            via[c] = static_cast<std::uint32_t>(s);
            bfs_order.push_back(c);
          }
        }
      }
      g.table.assign(order * order, 0);
      for (std::size_t a = 0; a < order; ++a) {
        Elem* row = g.table.data() + a * order;
        row[0] = static_cast<Elem>(a);
        for (std::size_t pos = 1; pos < bfs_order.size(); ++pos) {
          auto c = bfs_order[pos];
          Elem pb = row[bfs_to_lex[parent[c]]];
          row[bfs_to_lex[c]] = rmul_lex[pb * ngen + via[c]];
        }
      }
    }
  }

  std::shared_ptr<const Impl> impl_;
};

}  // namespace invgen
