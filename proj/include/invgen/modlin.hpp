#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgen/errors.hpp"
#include "invgen/families.hpp"
#include "invgen/gf.hpp"
#include "invgen/group.hpp"

namespace invgen {

inline constexpr std::size_t kIrreducibleScanCap = std::size_t{1} << 16;  // |V| for the projective-point scan

// H acting on V = GF(p)^dim from the right: v^h = v * M_h, M_{gh} = M_g M_h.
struct ModuleAction {
  Group group;
  int p = 2;
  std::size_t dim = 0;
  std::vector<GFMatrix> gen_images;   // one per generator of group, in order
  std::vector<GFMatrix> elem_images;  // indexed by element
  bool faithful = false;
  bool irreducible = false;
  bool absolutely_irreducible = false;

  const GFMatrix& matrix(Elem h) const { return elem_images.at(h); }
  GFVector act(const GFVector& v, Elem h) const { return vec_mul(v, elem_images.at(h)); }
  /// |V|
  std::size_t module_order() const { return checked_power(static_cast<std::size_t>(p), dim, 1u << 30, "module size"); }
};

/// Submodule spanned by the orbit of v.
inline Subspace spin(const std::vector<GFMatrix>& gens, int p, std::size_t dim, const GFVector& v) {
  Subspace s(p, dim);
  if (!s.add(v)) return s;
  std::vector<GFVector> queue{v};
  for (std::size_t pos = 0; pos < queue.size(); ++pos)
    for (const auto& m : gens) {
      auto w = vec_mul(queue[pos], m);
      if (s.add(w)) queue.push_back(std::move(w));
    }
  return s;
}

/// Every proper nonzero submodule contains the spin of one of its projective
/// points, so scanning all points decides irreducibility.
inline bool is_irreducible(const std::vector<GFMatrix>& gens, int p, std::size_t dim) {
  if (dim == 0) return false;
  const std::size_t total = checked_power(static_cast<std::size_t>(p), dim, kIrreducibleScanCap, "irreducibility scan");
  for (std::size_t code = 1; code < total; ++code) {
    auto v = decode_vector(code, p, dim);
    std::size_t lead = 0;
    while (v[lead] == 0) ++lead;
    if (v[lead] != 1) continue;  // one representative per projective point
    if (spin(gens, p, dim, v).dim() < dim) return false;
  }
  return true;
}

/// Basis of { X : X M = M X for every M in gens }.
inline std::vector<GFMatrix> commutant_basis(const std::vector<GFMatrix>& gens, int p, std::size_t dim) {
  const std::size_t n2 = dim * dim;
  // Unknown X flattened row-major; column block per generator holds X M - M X.
  GFMatrix sys(p, n2, std::max<std::size_t>(1, gens.size()) * n2);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const auto& m = gens[g];
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) {
        const std::size_t var = i * dim + k;  // X(i,k)
        // (XM)(i,j) += X(i,k) M(k,j)
        for (std::size_t j = 0; j < dim; ++j)
          sys(var, g * n2 + i * dim + j) = mod_p(sys(var, g * n2 + i * dim + j) + m(k, j), p);
        // (MX)(r,k) += M(r,i) X(i,k)
        for (std::size_t r = 0; r < dim; ++r)
          sys(var, g * n2 + r * dim + k) = mod_p(sys(var, g * n2 + r * dim + k) - m(r, i), p);
      }
  }
  std::vector<GFMatrix> out;
  for (const auto& v : left_kernel(sys)) {
    GFMatrix x(p, dim, dim);
    x.a = v;
    out.push_back(std::move(x));
  }
  return out;
}

inline ModuleAction make_module_action(const Group& h, int p, std::vector<GFMatrix> gen_images) {
  if (!is_prime(p)) throw InputError("module: p = " + std::to_string(p) + " is not prime");
  if (gen_images.size() != h.generators().size())
    throw InputError("module: " + std::to_string(gen_images.size()) + " matrices for " +
                     std::to_string(h.generators().size()) + " generators");
  ModuleAction act;
  act.group = h;
  act.p = p;
  act.dim = gen_images.empty() ? 0 : gen_images[0].rows;
  for (const auto& m : gen_images) {
    if (m.rows != m.cols || m.p != p) throw InputError("module: matrices must be square over GF(p)");
    if (m.rows != act.dim) throw InputError("module: matrices of different sizes");
    if (!is_invertible(m)) throw InputError("module: generator matrix is singular");
  }
  act.gen_images = std::move(gen_images);
  if (act.dim == 0) throw InputError("module: dimension must be positive");

  // Images along a BFS tree, then every Cayley edge x -> x s must agree.
  const auto& gi = h.generator_indices();
  std::vector<std::optional<GFMatrix>> img(h.order());
  img[0] = GFMatrix::identity(p, act.dim);
  std::vector<Elem> queue{0};
  for (std::size_t pos = 0; pos < queue.size(); ++pos) {
    const Elem x = queue[pos];
    for (std::size_t s = 0; s < gi.size(); ++s) {
      const Elem y = h.mul(x, gi[s]);
      GFMatrix my = *img[x] * act.gen_images[s];
      if (!img[y]) {
        img[y] = std::move(my);
        queue.push_back(y);
      } else if (!(*img[y] == my)) {
        throw InputError("module: matrices do not define a homomorphism of " + h.name());
      }
    }
  }
  for (auto& m : img) act.elem_images.push_back(std::move(*m));
  if (h.has_table() && h.order() <= 256)
    for (Elem a = 0; a < h.order(); ++a)
      for (Elem b = 0; b < h.order(); ++b)
        if (!(act.elem_images[h.mul(a, b)] == act.elem_images[a] * act.elem_images[b]))
          throw InvariantBreach("module: homomorphism check failed on the multiplication table");

  const auto id = GFMatrix::identity(p, act.dim);
  std::size_t kernel = 0;
  for (const auto& m : act.elem_images)
    if (m == id) ++kernel;
  act.faithful = kernel == 1;
  act.irreducible = is_irreducible(act.gen_images, p, act.dim);
  act.absolutely_irreducible = act.irreducible && commutant_basis(act.gen_images, p, act.dim).size() == 1;
  return act;
}

/// The matrix group generated by `mats`, as permutations of the vectors of V.
inline Group matrix_group(int p, const std::vector<GFMatrix>& mats, std::size_t dim, const Limits& limits = {}) {
  Limits lim = limits;
  lim.max_degree = kMaxStorableDegree;
  const std::size_t npts = checked_power(static_cast<std::size_t>(p), dim, kMaxStorableDegree, "module size (points)");
  std::vector<Permutation> gens;
  for (const auto& m : mats) {
    if (m.rows != dim || m.cols != dim) throw InputError("module: matrices of different sizes");
    std::vector<int> images(npts);
    for (std::size_t c = 0; c < npts; ++c)
      images[c] = static_cast<int>(encode_vector(vec_mul(decode_vector(c, p, dim), m), p));
    gens.push_back(Permutation::from_images(images));
  }
  return Group::from_generators("GL-sub(" + std::to_string(dim) + "," + std::to_string(p) + ")", npts,
                                std::move(gens), lim);
}

/// {"group": <descriptor>, "p", "dim", "matrices"}; without "group", H is
/// the matrix group itself acting on the vectors of V.
inline ModuleAction load_module_action(const nlohmann::json& d, const Limits& limits = {}) {
  if (!d.is_object()) throw InputError("module descriptor must be a JSON object");
  const int p = json_int(d, "p");
  const int dim = json_int(d, "dim");
  if (!is_prime(p)) throw InputError("module: p = " + std::to_string(p) + " is not prime");
  if (dim < 1) throw InputError("module: dim must be positive");
  if (!d.contains("matrices") || !d["matrices"].is_array()) throw InputError("module: missing \"matrices\" array");
  std::vector<GFMatrix> mats;
  for (const auto& mj : d["matrices"]) {
    if (!mj.is_array() || mj.size() != static_cast<std::size_t>(dim))
      throw InputError("module: each matrix needs " + std::to_string(dim) + " rows");
    std::vector<GFVector> rows;
    for (const auto& r : mj) {
      if (!r.is_array()) throw InputError("module: matrix rows must be arrays");
      GFVector row;
      for (const auto& x : r) {
        if (!x.is_number_integer()) throw InputError("module: matrix entries must be integers");
        row.push_back(x.get<int>());
      }
      rows.push_back(std::move(row));
    }
    mats.push_back(GFMatrix::from_rows(p, rows, static_cast<std::size_t>(dim)));
  }
  Group h = d.contains("group") ? load_group(d["group"], limits)
                                : matrix_group(p, mats, static_cast<std::size_t>(dim), limits);
  return make_module_action(h, p, std::move(mats));
}

inline nlohmann::json describe_module(const ModuleAction& act) {
  nlohmann::json mats = nlohmann::json::array();
  for (const auto& m : act.gen_images) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows; ++i) rows.push_back(m.row(i));
    mats.push_back(rows);
  }
  // generator order matters here, so the group is written out as given
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : act.group.generators()) gens.push_back(g.one_based());
  nlohmann::json group = {{"name", act.group.name()}, {"degree", act.group.degree()}, {"generators", gens}};
  return {{"group", group}, {"p", act.p}, {"dim", act.dim}, {"matrices", mats}};
}

// F = End_H(V) as a GF(p)-algebra of matrices acting on the right of V.
struct EndField {
  int p = 2;
  std::size_t dim = 0;  // dim_p V
  std::size_t e = 1;
  std::size_t q = 2;
  std::size_t n = 0;  // dim_F V
  std::vector<GFMatrix> basis;
};

inline EndField end_algebra(const ModuleAction& act) {
  if (!act.irreducible) throw PreconditionError("end_algebra: action is reducible");
  EndField f;
  f.p = act.p;
  f.dim = act.dim;
  f.basis = commutant_basis(act.gen_images, act.p, act.dim);
  f.e = f.basis.size();
  if (f.e == 0) throw InvariantBreach("commutant is zero");
  if (act.dim % f.e != 0) throw InvariantBreach("dim_p V not divisible by dim End_H(V)");
  f.n = act.dim / f.e;
  f.q = checked_power(static_cast<std::size_t>(act.p), f.e, std::size_t{1} << 30, "endomorphism field");

  // Verified, not assumed: commuting, closed, commutative, nonzero elements invertible.
  Subspace flat(act.p, act.dim * act.dim);
  for (const auto& b : f.basis) flat.add(b.a);
  for (const auto& b : f.basis)
    for (const auto& m : act.gen_images)
      if (!(b * m == m * b)) throw InvariantBreach("commutant element fails to commute");
  for (const auto& x : f.basis)
    for (const auto& y : f.basis) {
      auto xy = x * y;
      if (!(xy == y * x)) throw InvariantBreach("End_H(V) is not commutative");
      if (!flat.contains(xy.a)) throw InvariantBreach("End_H(V) not closed under products");
    }
  if (f.q <= (std::size_t{1} << 16)) {
    for (std::size_t code = 1; code < f.q; ++code) {
      auto c = decode_vector(code, act.p, f.e);
      GFMatrix x(act.p, act.dim, act.dim);
      for (std::size_t i = 0; i < f.e; ++i)
        for (std::size_t j = 0; j < x.a.size(); ++j)
          x.a[j] = static_cast<int>((x.a[j] + static_cast<long long>(c[i]) * f.basis[i].a[j]) % act.p);
      if (!is_invertible(x)) throw InvariantBreach("End_H(V) has a nonzero singular element");
    }
  }
  return f;
}

/// v * X for the F-element X, on each dim-sized block of v.
inline GFVector f_act(const GFVector& v, const GFMatrix& x) {
  const std::size_t d = x.rows;
  if (v.size() % d) throw InputError("vector length not a multiple of dim V");
  GFVector out;
  out.reserve(v.size());
  for (std::size_t b = 0; b < v.size(); b += d) {
    GFVector block(v.begin() + b, v.begin() + b + d);
    auto r = vec_mul(block, x);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

/// GF(p)-span of { v * X : v in vs, X in the F-basis }.
inline Subspace f_span(const std::vector<GFVector>& vs, std::size_t ambient, const EndField& f) {
  if (ambient % f.dim) throw InputError("ambient dimension not a multiple of dim V");
  Subspace s(f.p, ambient);
  for (const auto& v : vs) {
    if (v.size() != ambient) throw InputError("vector length does not match the ambient space");
    for (const auto& x : f.basis) s.add(f_act(v, x));
  }
  return s;
}

inline Subspace f_closure(const Subspace& s, const EndField& f) { return f_span(s.basis(), s.ambient(), f); }

inline std::size_t f_dim(const Subspace& s, const EndField& f) {
  if (s.dim() % f.e) throw InvariantBreach("subspace is not closed under End_H(V)");
  return s.dim() / f.e;
}

inline std::size_t f_span_dim(const std::vector<GFVector>& vs, std::size_t ambient, const EndField& f) {
  return f_dim(f_span(vs, ambient, f), f);
}

/// F-independence of vs modulo the F-closure of s.
inline bool f_independent_mod(const std::vector<GFVector>& vs, const Subspace& s, const EndField& f) {
  Subspace base = f_closure(s, f);
  Subspace total = base + f_span(vs, s.ambient(), f);
  return f_dim(total, f) - f_dim(base, f) == vs.size();
}

/// C_V(h) = ker(M_h - I).
inline Subspace fixed_space(const ModuleAction& act, Elem h) {
  if (h >= act.group.order()) throw InputError("fixed_space: element outside H");
  auto k = left_kernel(act.matrix(h) - GFMatrix::identity(act.p, act.dim));
  return Subspace::span(act.p, act.dim, k);
}

/// [h, V] = image of v -> v M_h - v.
inline Subspace commutator_space(const ModuleAction& act, Elem h) {
  const auto d = act.matrix(h) - GFMatrix::identity(act.p, act.dim);
  std::vector<GFVector> rows;
  for (std::size_t i = 0; i < d.rows; ++i) rows.push_back(d.row(i));
  return Subspace::span(act.p, act.dim, rows);
}

/// Sum-zero submodule of the permutation module GF(p)^n, basis e_i - e_n.
/// Needs p not dividing n, so that it is a direct summand.
inline ModuleAction deleted_permutation_module(const Group& g, int p) {
  const std::size_t n = g.degree();
  if (n < 2) throw PreconditionError("deleted permutation module needs degree >= 2");
  if (n % static_cast<std::size_t>(p) == 0) throw PreconditionError("deleted permutation module needs p not dividing n");
  const std::size_t d = n - 1;
  std::vector<GFMatrix> mats;
  for (const auto& pi : g.generators()) {
    GFMatrix m(p, d, d);
    const auto last = pi.images()[n - 1];
    for (std::size_t i = 0; i < d; ++i) {
      const auto img = pi.images()[i];
      if (img < d) m(i, img) = (m(i, img) + 1) % p;
      if (last < d) m(i, last) = mod_p(m(i, last) - 1, p);
    }
    mats.push_back(std::move(m));
  }
  return make_module_action(g, p, std::move(mats));
}

struct DerivationSpace {
  std::size_t dim_der = 0;   // over GF(p)
  std::size_t dim_ider = 0;  // over GF(p)
  std::size_t e = 1;         // dim_p F, or 1 when the action is reducible
  bool over_end_field = false;
  std::size_t m = 0;  // dim_F H^1 (dim_p H^1 when !over_end_field)
  // basis[b][s] = delta_b(generator s); values[b][x] = delta_b(x)
  std::vector<std::vector<GFVector>> basis;
  std::vector<std::vector<GFVector>> values;
};

inline bool satisfies_cocycle_identity(const ModuleAction& act, const std::vector<GFVector>& values) {
  const auto& h = act.group;
  for (Elem a = 0; a < h.order(); ++a)
    for (Elem b = 0; b < h.order(); ++b) {
      auto rhs = vec_add(act.act(values[a], b), values[b], act.p);
      if (rhs != values[h.mul(a, b)]) return false;
    }
  return true;
}

/// Der(H, V) from the Cayley graph: delta(x s) = delta(x) M_s + delta(s) on
/// every edge, with delta(x) = z A_x linear in z = (delta(s))_s.
inline DerivationSpace derivation_space(const ModuleAction& act) {
  const auto& h = act.group;
  if (h.is_trivial()) throw PreconditionError("derivation_space: H must be nontrivial");
  const int p = act.p;
  const std::size_t d = act.dim, t = act.gen_images.size(), nz = t * d;
  const auto& gi = h.generator_indices();

  std::vector<std::optional<GFMatrix>> a(h.order());
  a[0] = GFMatrix(p, nz, d);
  auto step = [&](const GFMatrix& ax, std::size_t s) {
    GFMatrix r = ax * act.gen_images[s];
    for (std::size_t i = 0; i < d; ++i) r(s * d + i, i) = (r(s * d + i, i) + 1) % p;
    return r;
  };
  std::vector<Elem> queue{0};
  std::vector<std::pair<Elem, std::size_t>> back_edges;
  for (std::size_t pos = 0; pos < queue.size(); ++pos) {
    const Elem x = queue[pos];
    for (std::size_t s = 0; s < t; ++s) {
      const Elem y = h.mul(x, gi[s]);
      if (!a[y]) {
        a[y] = step(*a[x], s);
        queue.push_back(y);
      } else {
        back_edges.emplace_back(x, s);
      }
    }
  }

  // Solution space in z-coordinates, cut down by every non-tree edge.
  GFMatrix sol = GFMatrix::identity(p, nz);
  for (auto [x, s] : back_edges) {
    const Elem y = h.mul(x, gi[s]);
    GFMatrix c = *a[y] - step(*a[x], s);
    if (c.is_zero() || sol.rows == 0) continue;
    GFMatrix pc = sol * c;
    if (pc.is_zero()) continue;
    auto k = left_kernel(pc);
    GFMatrix kk(p, k.size(), sol.rows);
    for (std::size_t i = 0; i < k.size(); ++i)
      for (std::size_t j = 0; j < sol.rows; ++j) kk(i, j) = k[i][j];
    sol = kk * sol;
  }

  DerivationSpace ds;
  ds.dim_der = sol.rows;
  for (std::size_t b = 0; b < sol.rows; ++b) {
    GFVector z = sol.row(b);
    std::vector<GFVector> gens;
    for (std::size_t s = 0; s < t; ++s) gens.emplace_back(z.begin() + s * d, z.begin() + (s + 1) * d);
    std::vector<GFVector> vals(h.order());
    for (Elem x = 0; x < h.order(); ++x) vals[x] = vec_mul(z, *a[x]);
    ds.basis.push_back(std::move(gens));
    ds.values.push_back(std::move(vals));
  }

  // Inner derivations delta_v(s) = v M_s - v, as z-vectors.
  Subspace der = Subspace::span(p, nz, [&] {
    std::vector<GFVector> rows;
    for (std::size_t b = 0; b < sol.rows; ++b) rows.push_back(sol.row(b));
    return rows;
  }());
  Subspace ider(p, nz);
  for (std::size_t i = 0; i < d; ++i) {
    GFVector v(d, 0);
    v[i] = 1;
    GFVector z;
    for (std::size_t s = 0; s < t; ++s) {
      auto w = vec_sub(vec_mul(v, act.gen_images[s]), v, p);
      z.insert(z.end(), w.begin(), w.end());
    }
    if (!der.contains(z)) throw InvariantBreach("inner derivation outside the derivation space");
    ider.add(z);
  }
  ds.dim_ider = ider.dim();

  if (act.irreducible) {
    ds.e = end_algebra(act).e;
    ds.over_end_field = true;
  }
  const std::size_t h1 = ds.dim_der - ds.dim_ider;
  if (h1 % ds.e) throw InvariantBreach("dim_p H^1 not divisible by e");
  ds.m = h1 / ds.e;
  return ds;
}

}  // namespace invgen
