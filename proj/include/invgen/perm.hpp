#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "invgen/errors.hpp"

namespace invgen {

using Point = std::uint8_t;
inline constexpr std::size_t kMaxStorableDegree = 256;

// A bijection of {0..degree-1}. Products compose left to right:
// (a * b)(x) = b(a(x)), so a is applied first.
class Permutation {
public:
  Permutation() = default;

  static Permutation identity(std::size_t degree) {
    Permutation p;
    p.images_.resize(degree);
    for (std::size_t i = 0; i < degree; ++i) p.images_[i] = static_cast<Point>(i);
    return p;
  }

  /// Builds from 0-based images; throws InputError unless this is a bijection.
  static Permutation from_images(std::span<const int> images) {
    if (images.empty()) throw InputError("permutation of degree 0");
    if (images.size() > kMaxStorableDegree)
      throw InputError("permutation degree " + std::to_string(images.size()) + " exceeds " +
                       std::to_string(kMaxStorableDegree));
    std::vector<bool> seen(images.size(), false);
    Permutation p;
    p.images_.reserve(images.size());
    for (int v : images) {
      if (v < 0 || static_cast<std::size_t>(v) >= images.size() || seen[v])
        throw InputError("malformed permutation: images are not a bijection");
      seen[v] = true;
      p.images_.push_back(static_cast<Point>(v));
    }
    return p;
  }

  /// 1-based image list as used by every file format.
  static Permutation from_one_based(std::span<const int> images) {
    std::vector<int> zero(images.begin(), images.end());
    for (auto& v : zero) --v;
    return from_images(zero);
  }

  /// Builds from disjoint cycles written with 1-based points.
  static Permutation from_cycles(std::size_t degree, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> img(degree);
    for (std::size_t i = 0; i < degree; ++i) img[i] = static_cast<int>(i);
    std::vector<bool> used(degree, false);
    for (const auto& c : cycles) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        int a = c[i] - 1;
        int b = c[(i + 1) % c.size()] - 1;
        if (a < 0 || static_cast<std::size_t>(a) >= degree || used[a])
          throw InputError("malformed cycle notation");
        used[a] = true;
        img[a] = b;
      }
    }
    return from_images(img);
  }

  std::size_t degree() const { return images_.size(); }
  Point operator[](std::size_t x) const { return images_[x]; }
  const std::vector<Point>& images() const { return images_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i) return false;
    return true;
  }

  /// this first, then other.
  Permutation operator*(const Permutation& other) const {
    Permutation r;
    r.images_.resize(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) r.images_[i] = other.images_[images_[i]];
    return r;
  }

  Permutation inverse() const {
    Permutation r;
    r.images_.resize(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) r.images_[images_[i]] = static_cast<Point>(i);
    return r;
  }

  /// x^-1 * this * x
  Permutation conjugate_by(const Permutation& x) const { return x.inverse() * (*this) * x; }

  std::vector<int> one_based() const {
    std::vector<int> out(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) out[i] = images_[i] + 1;
    return out;
  }

  std::string key() const { return std::string(images_.begin(), images_.end()); }

  std::string cycle_string() const {
    std::string s;
    std::vector<bool> seen(images_.size(), false);
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (seen[i] || images_[i] == i) continue;
      s += '(';
      std::size_t j = i;
      bool first = true;
      while (!seen[j]) {
        seen[j] = true;
        if (!first) s += ' ';
        s += std::to_string(j + 1);
        first = false;
        j = images_[j];
      }
      s += ')';
    }
    return s.empty() ? "()" : s;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
  std::vector<Point> images_;
};

}  // namespace invgen
