#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "invgen/errors.hpp"
#include "invgen/gf.hpp"
#include "invgen/group.hpp"
#include "invgen/modlin.hpp"

namespace invgen {

// V^u x| H acting affinely on the vectors of V^u: the element h w sends x to
// x M_h + w (M_h applied on each of the u blocks). Points are base-p codes.
struct AffineLift {
  const ModuleAction* act = nullptr;
  std::size_t u = 0;
  std::size_t points = 1;

  AffineLift(const ModuleAction& a, std::size_t u_) : act(&a), u(u_) {
    points = checked_power(static_cast<std::size_t>(a.p), a.dim * u, kMaxStorableDegree, "affine lift points");
  }

  std::size_t vdim() const { return act->dim * u; }

  GFVector apply(const GFVector& x, Elem h, const GFVector& w) const {
    GFVector y;
    y.reserve(vdim());
    const auto& m = act->matrix(h);
    for (std::size_t b = 0; b < u; ++b) {
      GFVector block(x.begin() + b * act->dim, x.begin() + (b + 1) * act->dim);
      auto r = vec_mul(block, m);
      y.insert(y.end(), r.begin(), r.end());
    }
    return vec_add(y, w, act->p);
  }

  Permutation element(Elem h, const GFVector& w) const {
    if (w.size() != vdim()) throw InputError("lift vector has length " + std::to_string(w.size()) + ", expected " +
                                             std::to_string(vdim()));
    std::vector<int> images(points);
    for (std::size_t c = 0; c < points; ++c)
      images[c] = static_cast<int>(encode_vector(apply(decode_vector(c, act->p, vdim()), h, w), act->p));
    return Permutation::from_images(images);
  }

  /// (h, w) with perm = h w; needs a faithful action.
  std::pair<Elem, GFVector> decompose(const Permutation& perm) const {
    const auto& im = perm.images();
    GFVector w = decode_vector(im[0], act->p, vdim());
    GFMatrix m(act->p, act->dim, act->dim);
    for (std::size_t j = 0; j < act->dim; ++j) {
      GFVector e(vdim(), 0);
      e[j] = 1;
      auto row = vec_sub(decode_vector(im[encode_vector(e, act->p)], act->p, vdim()), w, act->p);
      for (std::size_t k = 0; k < act->dim; ++k) m(j, k) = row[k];
    }
    for (Elem h = 0; h < act->group.order(); ++h)
      if (act->matrix(h) == m) return {h, w};
    throw InputError("permutation is not an element of the affine lift");
  }

  /// Generated by the lifted generators of H and the unit translations.
  Group group(const Limits& limits = {}) const {
    Limits lim = limits;
    lim.max_degree = kMaxStorableDegree;
    std::vector<Permutation> gens;
    const GFVector zero(vdim(), 0);
    for (Elem s : act->group.generator_indices()) gens.push_back(element(s, zero));
    for (std::size_t i = 0; i < vdim(); ++i) {
      GFVector e = zero;
      e[i] = 1;
      gens.push_back(element(0, e));
    }
    std::string name = "V^" + std::to_string(u) + ":" + act->group.name();
    return Group::from_generators(std::move(name), points, std::move(gens), lim);
  }
};

}  // namespace invgen
