#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgen/errors.hpp"
#include "invgen/group.hpp"
#include "invgen/perm.hpp"

namespace invgen {

// Arithmetic in GF(p^k) on integers 0..p^k-1 read as base-p coefficient
// vectors, modulo the first monic irreducible polynomial in base-p order.
class SmallField {
public:
  SmallField(int p, int k) : p_(p), k_(k) {
    if (p < 2 || k < 1) throw InputError("field parameters must satisfy p >= 2, k >= 1");
    for (int d = 2; d * d <= p; ++d)
      if (p % d == 0) throw InputError(std::to_string(p) + " is not prime");
    q_ = 1;
    for (int i = 0; i < k; ++i) q_ *= p;
    modulus_ = find_irreducible();
    primitive_ = find_primitive();
  }

  int p() const { return p_; }
  int k() const { return k_; }
  int q() const { return q_; }
  int primitive() const { return primitive_; }

  int add(int a, int b) const {
    int r = 0, place = 1;
    for (int i = 0; i < k_; ++i) {
      r += ((a % p_ + b % p_) % p_) * place;
      a /= p_;
      b /= p_;
      place *= p_;
    }
    return r;
  }

  int mul(int a, int b) const {
    std::vector<int> x = digits(a), y = digits(b), prod(2 * k_ - 1, 0);
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + x[i] * y[j]) % p_;
    // reduce by the monic modulus
    for (int d = 2 * k_ - 2; d >= k_; --d) {
      int c = prod[d];
      if (!c) continue;
      for (int i = 0; i <= k_; ++i) prod[d - k_ + i] = ((prod[d - k_ + i] - c * modulus_[i]) % p_ + p_) % p_;
    }
    int r = 0, place = 1;
    for (int i = 0; i < k_; ++i) {
      r += prod[i] * place;
      place *= p_;
    }
    return r;
  }

private:
  std::vector<int> digits(int a) const {
    std::vector<int> d(k_);
    for (int i = 0; i < k_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }

  // Coefficients c_0..c_k with c_k = 1.
  std::vector<int> find_irreducible() const {
    if (k_ == 1) return {0, 1};
    for (int low = 0; low < q_; ++low) {
      std::vector<int> f = digits(low);
      f.push_back(1);
      if (is_irreducible(f)) return f;
    }
    throw InvariantBreach("no irreducible polynomial found");
  }

  bool is_irreducible(const std::vector<int>& f) const {
    // trial division by every monic polynomial of degree 1..k/2
    for (int d = 1; 2 * d <= k_; ++d) {
      int count = 1;
      for (int i = 0; i < d; ++i) count *= p_;
      for (int low = 0; low < count; ++low) {
        std::vector<int> g(d + 1);
        int t = low;
        for (int i = 0; i < d; ++i) {
          g[i] = t % p_;
          t /= p_;
        }
        g[d] = 1;
        std::vector<int> r = f;
        for (int deg = static_cast<int>(r.size()) - 1; deg >= d; --deg) {
          int c = r[deg];
          if (!c) continue;
          for (int i = 0; i <= d; ++i) r[deg - d + i] = ((r[deg - d + i] - c * g[i]) % p_ + p_) % p_;
        }
        bool zero = true;
        for (int i = 0; i < d; ++i)
          if (r[i]) zero = false;
        if (zero) return false;
      }
    }
    return true;
  }

  int find_primitive() const {
    for (int a = 1; a < q_; ++a) {
      int x = a, ord = 1;
      while (x != 1) {
        x = mul(x, a);
        ++ord;
      }
      if (ord == q_ - 1) return a;
    }
    throw InvariantBreach("no primitive element found");
  }

  int p_, k_, q_ = 1;
  std::vector<int> modulus_;
  int primitive_ = 1;
};

namespace families {

inline Group trivial(const Limits& limits = {}) { return Group::from_generators("1", 1, {}, limits); }

inline Group cyclic(int n, const Limits& limits = {}) {
  if (n < 1) throw InputError("cyclic: n must be >= 1");
  if (n == 1) return trivial(limits);
  std::vector<int> c(n);
  for (int i = 0; i < n; ++i) c[i] = i + 1;
  return Group::from_generators("C_" + std::to_string(n), n, {Permutation::from_cycles(n, {c})}, limits);
}

inline Group symmetric(int n, const Limits& limits = {}) {
  if (n < 1) throw InputError("sym: n must be >= 1");
  if (n == 1) return Group::from_generators("Sym(1)", 1, {}, limits);
  std::vector<int> c(n);
  for (int i = 0; i < n; ++i) c[i] = i + 1;
  std::vector<Permutation> gens{Permutation::from_cycles(n, {{1, 2}})};
  if (n > 2) gens.push_back(Permutation::from_cycles(n, {c}));
  return Group::from_generators("Sym(" + std::to_string(n) + ")", n, std::move(gens), limits);
}

inline Group alternating(int n, const Limits& limits = {}) {
  if (n < 1) throw InputError("alt: n must be >= 1");
  const std::string name = "Alt(" + std::to_string(n) + ")";
  if (n < 3) return Group::from_generators(name, n, {}, limits);
  std::vector<Permutation> gens{Permutation::from_cycles(n, {{1, 2, 3}})};
  if (n > 3) {
    std::vector<int> c;
    for (int i = (n % 2 ? 1 : 2); i <= n; ++i) c.push_back(i);
    gens.push_back(Permutation::from_cycles(n, {c}));
  }
  return Group::from_generators(name, n, std::move(gens), limits);
}

/// Symmetries of the n-gon, order 2n. D_2 is the Klein four-group on 4 points.
inline Group dihedral(int n, const Limits& limits = {}) {
  if (n < 1) throw InputError("dihedral: n must be >= 1");
  const std::string name = "D_" + std::to_string(n);
  if (n == 1) return Group::from_generators(name, 2, {Permutation::from_cycles(2, {{1, 2}})}, limits);
  if (n == 2)
    return Group::from_generators(
        name, 4, {Permutation::from_cycles(4, {{1, 2}, {3, 4}}), Permutation::from_cycles(4, {{1, 3}, {2, 4}})},
        limits);
  std::vector<int> rot(n);
  for (int i = 0; i < n; ++i) rot[i] = i + 1;
  std::vector<std::vector<int>> refl;
  for (int i = 2, j = n; i < j; ++i, --j) refl.push_back({i, j});
  return Group::from_generators(name, n, {Permutation::from_cycles(n, {rot}), Permutation::from_cycles(n, refl)},
                                limits);
}

/// (C_p)^k as k disjoint p-cycles.
inline Group elementary_abelian(int p, int k, const Limits& limits = {}) {
  if (p < 2 || k < 1) throw InputError("elemab: need p >= 2 and k >= 1");
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) throw InputError("elemab: p must be prime");
  const int degree = p * k;
  std::vector<Permutation> gens;
  for (int i = 0; i < k; ++i) {
    std::vector<int> c(p);
    for (int j = 0; j < p; ++j) c[j] = i * p + j + 1;
    gens.push_back(Permutation::from_cycles(degree, {c}));
  }
  std::string name = "C_" + std::to_string(p) + (k > 1 ? "^" + std::to_string(k) : "");
  return Group::from_generators(name, degree, std::move(gens), limits);
}

/// AGL(1,q) = {x -> a x + b} acting on GF(q), q a prime power.
inline Group agl1(int q, const Limits& limits = {}) {
  if (q < 2) throw InputError("agl1: q must be a prime power >= 2");
  int p = 2;
  while (q % p) ++p;
  int k = 0, t = q;
  while (t % p == 0) {
    t /= p;
    ++k;
  }
  if (t != 1) throw InputError("agl1: " + std::to_string(q) + " is not a prime power");
  SmallField f(p, k);
  std::vector<Permutation> gens;
  int basis = 1;
  for (int i = 0; i < k; ++i, basis *= p) {
    std::vector<int> img(q);
    for (int x = 0; x < q; ++x) img[x] = f.add(x, basis);
    gens.push_back(Permutation::from_images(img));
  }
  if (q > 2) {
    std::vector<int> img(q);
    for (int x = 0; x < q; ++x) img[x] = f.mul(f.primitive(), x);
    gens.push_back(Permutation::from_images(img));
  }
  return Group::from_generators("AGL(1," + std::to_string(q) + ")", q, std::move(gens), limits);
}

}  // namespace families

inline int json_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw InputError(std::string("descriptor: missing integer field \"") + key + "\"");
  return j[key].get<int>();
}

/// Group descriptor: explicit 1-based generators or a parametric family.
inline Group load_group(const nlohmann::json& d, const Limits& limits = {}) {
  if (!d.is_object()) throw InputError("group descriptor must be a JSON object");
  if (d.contains("family")) {
    if (!d["family"].is_string()) throw InputError("descriptor: family must be a string");
    const auto fam = d["family"].get<std::string>();
    if (fam == "sym") return families::symmetric(json_int(d, "n"), limits);
    if (fam == "alt") return families::alternating(json_int(d, "n"), limits);
    if (fam == "cyclic") return families::cyclic(json_int(d, "n"), limits);
    if (fam == "dihedral") return families::dihedral(json_int(d, "n"), limits);
    if (fam == "elemab") return families::elementary_abelian(json_int(d, "p"), json_int(d, "k"), limits);
    if (fam == "agl1") return families::agl1(json_int(d, "q"), limits);
    throw InputError("unknown group family \"" + fam + "\"");
  }
  const int degree = json_int(d, "degree");
  if (degree < 1) throw InputError("descriptor: degree must be positive");
  if (static_cast<std::size_t>(degree) > limits.max_degree) throw CapExceeded("degree", limits.max_degree);
  if (!d.contains("generators") || !d["generators"].is_array())
    throw InputError("descriptor: missing \"generators\" array");
  std::vector<Permutation> gens;
  for (const auto& g : d["generators"]) {
    if (!g.is_array()) throw InputError("descriptor: each generator must be an image list");
    std::vector<int> img;
    for (const auto& v : g) {
      if (!v.is_number_integer()) throw InputError("descriptor: images must be integers");
      img.push_back(v.get<int>());
    }
    if (static_cast<int>(img.size()) != degree)
      throw InputError("descriptor: generator length " + std::to_string(img.size()) + " != degree " +
                       std::to_string(degree));
    gens.push_back(Permutation::from_one_based(img));
  }
  std::string name = d.contains("name") && d["name"].is_string() ? d["name"].get<std::string>() : "G";
  return Group::from_generators(std::move(name), static_cast<std::size_t>(degree), std::move(gens), limits);
}

/// Canonical JSON form: name plus sorted generator image lists.
inline nlohmann::json describe(const Group& g) {
  auto j = nlohmann::json::parse(g.canonical());
  j["name"] = g.name();
  return j;
}

}  // namespace invgen
