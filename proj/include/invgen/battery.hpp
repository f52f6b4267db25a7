#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgen/families.hpp"
#include "invgen/modlin.hpp"

namespace invgen {

struct NamedModule {
  std::string name;
  ModuleAction act;
};

/// Right multiplication by c on GF(p^k), as a k x k matrix over GF(p).
inline GFMatrix field_multiplication_matrix(const SmallField& f, int c) {
  const auto k = static_cast<std::size_t>(f.k());
  GFMatrix m(f.p(), k, k);
  int basis = 1;
  for (std::size_t i = 0; i < k; ++i, basis *= f.p()) {
    auto v = decode_vector(static_cast<std::size_t>(f.mul(basis, c)), f.p(), k);
    for (std::size_t j = 0; j < k; ++j) m(i, j) = v[j];
  }
  return m;
}

/// A matrix over GF(p^k) (entries as SmallField codes) written over GF(p).
inline GFMatrix blow_up(const SmallField& f, const std::vector<std::vector<int>>& m) {
  const auto k = static_cast<std::size_t>(f.k());
  const std::size_t n = m.size();
  GFMatrix out(f.p(), n * k, n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto b = field_multiplication_matrix(f, m[i][j]);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) out(i * k + r, j * k + c) = b(r, c);
    }
  return out;
}

/// SL(2,4) on its natural module GF(4)^2, viewed as GF(2)^4.
inline ModuleAction sl24_natural() {
  SmallField f4(2, 2);
  const int w = f4.primitive(), w2 = f4.mul(w, w);
  std::vector<GFMatrix> mats{blow_up(f4, {{w, 0}, {0, w2}}), blow_up(f4, {{1, 1}, {0, 1}}),
                             blow_up(f4, {{0, 1}, {1, 0}})};
  return make_module_action(matrix_group(2, mats, 4), 2, mats);
}

/// Modules used by the cohomology and lifting property runs.
inline std::vector<NamedModule> module_battery() {
  std::vector<NamedModule> out;
  auto from_json = [&](const std::string& name, const char* text) {
    out.push_back({name, load_module_action(nlohmann::json::parse(text))});
  };
  from_json("C_2 on GF(3)", R"({"group":{"family":"cyclic","n":2},"p":3,"dim":1,"matrices":[[[2]]]})");
  from_json("C_3 on GF(2)^2", R"({"group":{"family":"cyclic","n":3},"p":2,"dim":2,"matrices":[[[0,1],[1,1]]]})");
  from_json("Sym(3) on GF(2)^2",
            R"({"group":{"family":"sym","n":3},"p":2,"dim":2,"matrices":[[[0,1],[1,0]],[[0,1],[1,1]]]})");
  from_json("C_5 on GF(2)^4", R"({"group":{"family":"cyclic","n":5},"p":2,"dim":4,
             "matrices":[[[0,1,0,0],[0,0,1,0],[0,0,0,1],[1,1,1,1]]]})");
  from_json("C_7 on GF(2)^3",
            R"({"group":{"family":"cyclic","n":7},"p":2,"dim":3,"matrices":[[[0,1,0],[0,0,1],[1,1,0]]]})");
  from_json("C_2 regular on GF(2)^2",
            R"({"group":{"family":"cyclic","n":2},"p":2,"dim":2,"matrices":[[[0,1],[1,0]]]})");
  from_json("C_3 on GF(7)", R"({"group":{"family":"cyclic","n":3},"p":7,"dim":1,"matrices":[[[2]]]})");
  from_json("GL(3,2) natural", R"({"p":2,"dim":3,"matrices":[[[1,1,0],[0,1,0],[0,0,1]],[[0,1,0],[0,0,1],[1,1,0]]]})");
  from_json("Q_8 on GF(3)^2", R"({"p":3,"dim":2,"matrices":[[[0,2],[1,0]],[[1,1],[1,2]]]})");
  out.push_back({"SL(2,4) on GF(2)^4", sl24_natural()});
  out.push_back({"Sym(4) on GF(3)^3", deleted_permutation_module(families::symmetric(4), 3)});
  out.push_back({"Alt(4) on GF(3)^3", deleted_permutation_module(families::alternating(4), 3)});
  out.push_back({"Alt(5) on GF(2)^4", deleted_permutation_module(families::alternating(5), 2)});
  out.push_back({"Sym(5) on GF(2)^4", deleted_permutation_module(families::symmetric(5), 2)});
  out.push_back({"Alt(5) on GF(3)^4", deleted_permutation_module(families::alternating(5), 3)});
  out.push_back({"D_5 on GF(2)^4", deleted_permutation_module(families::dihedral(5), 2)});
  out.push_back({"AGL(1,5) on GF(2)^4", deleted_permutation_module(families::agl1(5), 2)});
  return out;
}

}  // namespace invgen
