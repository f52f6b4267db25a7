#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "invgen/errors.hpp"

namespace invgen {

using GFVector = std::vector<int>;

inline bool is_prime(long long p) {
  if (p < 2) return false;
  for (long long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline int mod_p(long long a, int p) {
  a %= p;
  return static_cast<int>(a < 0 ? a + p : a);
}

inline int inv_mod(int a, int p) {
  a = mod_p(a, p);
  if (a == 0) throw InvariantBreach("inverse of zero mod " + std::to_string(p));
  long long r = 1, b = a;
  for (int e = p - 2; e > 0; e >>= 1) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
  }
  return static_cast<int>(r);
}

// Dense matrix over GF(p), row-major. Vectors are rows and act on the left:
// v -> v * M.
struct GFMatrix {
  int p = 2;
  std::size_t rows = 0, cols = 0;
  std::vector<int> a;

  GFMatrix() = default;
  GFMatrix(int p_, std::size_t r, std::size_t c) : p(p_), rows(r), cols(c), a(r * c, 0) {}

  static GFMatrix identity(int p, std::size_t n) {
    GFMatrix m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static GFMatrix from_rows(int p, const std::vector<GFVector>& rows, std::size_t cols) {
    GFMatrix m(p, rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw InputError("matrix row has wrong length");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = mod_p(rows[i][j], p);
    }
    return m;
  }

  int& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  int operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  GFVector row(std::size_t i) const { return GFVector(a.begin() + i * cols, a.begin() + (i + 1) * cols); }

  bool is_zero() const {
    for (int x : a)
      if (x) return false;
    return true;
  }

  friend bool operator==(const GFMatrix& x, const GFMatrix& y) {
    return x.p == y.p && x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }

  friend GFMatrix operator*(const GFMatrix& x, const GFMatrix& y) {
    if (x.cols != y.rows || x.p != y.p) throw InputError("matrix shape mismatch");
    GFMatrix r(x.p, x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k) {
        const long long c = x(i, k);
        if (!c) continue;
        for (std::size_t j = 0; j < y.cols; ++j) r(i, j) = static_cast<int>((r(i, j) + c * y(k, j)) % x.p);
      }
    return r;
  }

  friend GFMatrix operator+(GFMatrix x, const GFMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw InputError("matrix shape mismatch");
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] = (x.a[i] + y.a[i]) % x.p;
    return x;
  }

  friend GFMatrix operator-(GFMatrix x, const GFMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw InputError("matrix shape mismatch");
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] = mod_p(x.a[i] - y.a[i], x.p);
    return x;
  }
};

inline GFVector vec_mul(const GFVector& v, const GFMatrix& m) {
  if (v.size() != m.rows) throw InputError("vector/matrix shape mismatch");
  std::vector<long long> acc(m.cols, 0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (!v[i]) continue;
    for (std::size_t j = 0; j < m.cols; ++j) acc[j] += static_cast<long long>(v[i]) * m(i, j);
  }
  GFVector r(m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) r[j] = mod_p(acc[j], m.p);
  return r;
}

inline GFVector vec_add(GFVector a, const GFVector& b, int p) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + b[i]) % p;
  return a;
}

inline GFVector vec_sub(GFVector a, const GFVector& b, int p) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = mod_p(a[i] - b[i], p);
  return a;
}

inline GFVector vec_scale(GFVector a, int c, int p) {
  for (auto& x : a) x = mod_p(static_cast<long long>(x) * c, p);
  return a;
}

inline bool vec_is_zero(const GFVector& v) {
  for (int x : v)
    if (x) return false;
  return true;
}

/// Rows of a basis for { x : x * m = 0 }.
inline std::vector<GFVector> left_kernel(const GFMatrix& m) {
  const int p = m.p;
  const std::size_t r = m.rows, c = m.cols;
  // Row-reduce [m | I]; rows whose m-part vanishes carry kernel vectors.
  std::vector<GFVector> aug(r, GFVector(c + r, 0));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) aug[i][j] = m(i, j);
    aug[i][c + i] = 1;
  }
  std::size_t lead = 0;
  for (std::size_t col = 0; col < c && lead < r; ++col) {
    std::size_t piv = lead;
    while (piv < r && aug[piv][col] == 0) ++piv;
    if (piv == r) continue;
    std::swap(aug[lead], aug[piv]);
    const long long inv = inv_mod(aug[lead][col], p);
    for (auto& x : aug[lead]) x = static_cast<int>(x * inv % p);
    for (std::size_t i = 0; i < r; ++i) {
      if (i == lead || aug[i][col] == 0) continue;
      const long long f = aug[i][col];
      for (std::size_t j = 0; j < c + r; ++j) aug[i][j] = mod_p(aug[i][j] - f * aug[lead][j], p);
    }
    ++lead;
  }
  std::vector<GFVector> out;
  for (std::size_t i = lead; i < r; ++i) out.emplace_back(aug[i].begin() + c, aug[i].end());
  return out;
}

inline std::size_t rank(const GFMatrix& m) { return m.rows - left_kernel(m).size(); }

inline bool is_invertible(const GFMatrix& m) { return m.rows == m.cols && rank(m) == m.rows; }

inline GFMatrix inverse(const GFMatrix& m) {
  if (m.rows != m.cols) throw InputError("inverse of a non-square matrix");
  const int p = m.p;
  const std::size_t n = m.rows;
  std::vector<GFVector> aug(n, GFVector(2 * n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m(i, j);
    aug[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && aug[piv][col] == 0) ++piv;
    if (piv == n) throw InputError("matrix is singular");
    std::swap(aug[col], aug[piv]);
    const long long inv = inv_mod(aug[col][col], p);
    for (auto& x : aug[col]) x = static_cast<int>(x * inv % p);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || aug[i][col] == 0) continue;
      const long long f = aug[i][col];
      for (std::size_t j = 0; j < 2 * n; ++j) aug[i][j] = mod_p(aug[i][j] - f * aug[col][j], p);
    }
  }
  GFMatrix r(p, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = aug[i][n + j];
  return r;
}

// A GF(p)-subspace of GF(p)^ambient kept in semi-echelon form: row i is zero
// before pivot[i], has a 1 there, and pivots increase.
class Subspace {
public:
  Subspace(int p, std::size_t ambient) : p_(p), ambient_(ambient) {}

  static Subspace span(int p, std::size_t ambient, const std::vector<GFVector>& vs) {
    Subspace s(p, ambient);
    for (const auto& v : vs) s.add(v);
    return s;
  }

  int p() const { return p_; }
  std::size_t ambient() const { return ambient_; }
  std::size_t dim() const { return rows_.size(); }
  const std::vector<GFVector>& basis() const { return rows_; }

  /// v minus its component along the pivots.
  GFVector reduce(GFVector v) const {
    if (v.size() != ambient_) throw InputError("vector length " + std::to_string(v.size()) + " != ambient dimension " +
                                               std::to_string(ambient_));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const long long f = v[pivots_[i]];
      if (!f) continue;
      const auto& r = rows_[i];
      for (std::size_t j = pivots_[i]; j < ambient_; ++j) v[j] = mod_p(v[j] - f * r[j], p_);
    }
    return v;
  }

  bool contains(const GFVector& v) const { return vec_is_zero(reduce(v)); }

  /// Adds v; returns false when v was already in the span.
  bool add(const GFVector& v0) {
    GFVector v = reduce(v0);
    std::size_t piv = 0;
    while (piv < ambient_ && v[piv] == 0) ++piv;
    if (piv == ambient_) return false;
    const long long inv = inv_mod(v[piv], p_);
    for (auto& x : v) x = static_cast<int>(x * inv % p_);
    auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), piv) - pivots_.begin();
    pivots_.insert(pivots_.begin() + pos, piv);
    rows_.insert(rows_.begin() + pos, std::move(v));
    return true;
  }

  void add_all(const Subspace& o) {
    for (const auto& v : o.rows_) add(v);
  }

  bool is_subspace_of(const Subspace& o) const {
    for (const auto& v : rows_)
      if (!o.contains(v)) return false;
    return true;
  }

  friend Subspace operator+(Subspace a, const Subspace& b) {
    a.add_all(b);
    return a;
  }

private:
  int p_;
  std::size_t ambient_;
  std::vector<GFVector> rows_;
  std::vector<std::size_t> pivots_;
};

/// Integer code sum v_i p^i of a vector, used as a point label.
inline std::size_t encode_vector(const GFVector& v, int p) {
  std::size_t code = 0, place = 1;
  for (int x : v) {
    code += static_cast<std::size_t>(x) * place;
    place *= static_cast<std::size_t>(p);
  }
  return code;
}

inline GFVector decode_vector(std::size_t code, int p, std::size_t dim) {
  GFVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    v[i] = static_cast<int>(code % static_cast<std::size_t>(p));
    code /= static_cast<std::size_t>(p);
  }
  return v;
}

inline std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap, const std::string& what) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > cap / base) throw CapExceeded(what, cap);
    r *= base;
  }
  return r;
}

}  // namespace invgen
