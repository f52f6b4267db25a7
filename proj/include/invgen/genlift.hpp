#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgen/errors.hpp"
#include "invgen/gf.hpp"
#include "invgen/invariable.hpp"
#include "invgen/modlin.hpp"
#include "invgen/subgroups.hpp"

namespace invgen {

// Everything about H and V that the lifting criteria reuse across instances.
struct LiftContext {
  ModuleAction act;
  EndField field;
  DerivationSpace der;
  ClassCoverageTable coverage;  // of H
};

inline LiftContext make_lift_context(ModuleAction act) {
  if (act.group.is_trivial()) throw PreconditionError("lifting needs H != 1");
  if (!act.irreducible) throw PreconditionError("lifting needs an irreducible module");
  LiftContext ctx;
  ctx.field = end_algebra(act);
  ctx.der = derivation_space(act);
  ctx.coverage = coverage_table(act.group);
  ctx.act = std::move(act);
  return ctx;
}

struct LiftProblem {
  std::size_t u = 0;
  std::vector<Elem> hs;
  std::vector<GFVector> ws;  // ws[i] in V^u, blocks of dim_p V
};

enum class LiftMode { generate, invariably_generate };

inline bool generates(const Group& g, const std::vector<Elem>& hs) { return closure(g, hs).count() == g.order(); }

inline void require_generation(const LiftContext& ctx, const std::vector<Elem>& hs, LiftMode mode) {
  if (hs.empty()) throw PreconditionError("need at least one element h_i");
  for (Elem h : hs)
    if (h >= ctx.act.group.order()) throw InputError("h_i outside H");
  if (mode == LiftMode::generate) {
    if (!generates(ctx.act.group, hs)) throw PreconditionError("the h_i do not generate H");
  } else if (!invariably_generates(ctx.coverage, hs)) {
    throw PreconditionError("the h_i do not invariably generate H");
  }
}

/// Shortest invariably generating tuple of H made of class representatives,
/// trying lengths 1 and 2 only.
inline std::optional<std::vector<Elem>> short_invariable_tuple(const ClassCoverageTable& t) {
  for (const auto& c : t.classes.classes)
    if (invariably_generates(t, std::vector<Elem>{c.representative})) return std::vector<Elem>{c.representative};
  for (const auto& a : t.classes.classes)
    for (const auto& b : t.classes.classes)
      if (invariably_generates(t, std::vector<Elem>{a.representative, b.representative}))
        return std::vector<Elem>{a.representative, b.representative};
  return std::nullopt;
}

struct DWSpaces {
  Subspace D, W, sum;
  std::size_t dim_D = 0, dim_W = 0, dim_sum = 0;  // over F
};

/// D = {(delta(h_1), ..., delta(h_d))}, W = [h_1, V] x ... x [h_d, V] in V^d.
inline DWSpaces build_dw(const LiftContext& ctx, const std::vector<Elem>& hs) {
  require_generation(ctx, hs, LiftMode::generate);
  const auto& act = ctx.act;
  const std::size_t d = hs.size(), dim = act.dim, amb = d * dim;
  DWSpaces s{Subspace(act.p, amb), Subspace(act.p, amb), Subspace(act.p, amb)};
  for (const auto& vals : ctx.der.values) {
    GFVector v;
    for (Elem h : hs) v.insert(v.end(), vals[h].begin(), vals[h].end());
    s.D.add(v);
  }
  for (std::size_t i = 0; i < d; ++i) {
    const auto comm = commutator_space(act, hs[i]);
    for (const auto& b : comm.basis()) {
      GFVector v(amb, 0);
      std::copy(b.begin(), b.end(), v.begin() + i * dim);
      s.W.add(v);
    }
  }
  s.sum = s.D + s.W;
  s.dim_D = f_dim(s.D, ctx.field);
  s.dim_W = f_dim(s.W, ctx.field);
  s.dim_sum = f_dim(s.sum, ctx.field);
  return s;
}

/// r_j = (w_{1,j}, ..., w_{d,j}) in V^d.
inline std::vector<GFVector> lift_rows(const LiftContext& ctx, const LiftProblem& pr) {
  const std::size_t dim = ctx.act.dim;
  if (pr.ws.size() != pr.hs.size()) throw InputError("need one w_i per h_i");
  for (const auto& w : pr.ws)
    if (w.size() != pr.u * dim) throw InputError("each w_i must have u * dim entries");
  std::vector<GFVector> rows;
  for (std::size_t j = 0; j < pr.u; ++j) {
    GFVector r;
    for (const auto& w : pr.ws) r.insert(r.end(), w.begin() + j * dim, w.begin() + (j + 1) * dim);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// <h_1 w_1, ..., h_d w_d> = V^u x| H iff the r_j are F-independent modulo D.
inline bool gen_criterion(const LiftContext& ctx, const LiftProblem& pr) {
  require_generation(ctx, pr.hs, LiftMode::generate);
  auto rows = lift_rows(ctx, pr);
  if (pr.u == 0) return true;
  return f_independent_mod(rows, build_dw(ctx, pr.hs).D, ctx.field);
}

/// h_1 w_1, ..., h_d w_d invariably generate iff the r_j are F-independent modulo D + W.
inline bool invgen_criterion(const LiftContext& ctx, const LiftProblem& pr) {
  require_generation(ctx, pr.hs, LiftMode::invariably_generate);
  auto rows = lift_rows(ctx, pr);
  if (pr.u == 0) return true;
  return f_independent_mod(rows, build_dw(ctx, pr.hs).sum, ctx.field);
}

struct LiftRank {
  long long formula = 0;  // before clipping at 0
  std::size_t u_max = 0;
  std::vector<GFVector> ws;  // witness with u = u_max
};

inline LiftRank max_lift_rank(const LiftContext& ctx, const std::vector<Elem>& hs, LiftMode mode) {
  require_generation(ctx, hs, mode);
  const auto dw = build_dw(ctx, hs);
  const auto& base = mode == LiftMode::generate ? dw.D : dw.sum;
  const std::size_t d = hs.size(), dim = ctx.act.dim, amb = d * dim;
  const auto n = static_cast<long long>(ctx.field.n);
  LiftRank out;
  out.formula = mode == LiftMode::generate
                    ? n * (static_cast<long long>(d) - 1) - static_cast<long long>(ctx.der.m)
                    : n * static_cast<long long>(d) - static_cast<long long>(dw.dim_sum);
  // Complete a basis modulo the base space with unit vectors, in index order.
  std::vector<GFVector> rows;
  Subspace cur = base;
  for (std::size_t i = 0; i < amb; ++i) {
    GFVector e(amb, 0);
    e[i] = 1;
    if (cur.contains(e)) continue;
    cur = cur + f_span({e}, amb, ctx.field);
    rows.push_back(std::move(e));
  }
  out.u_max = rows.size();
  if (static_cast<long long>(out.u_max) != std::max(0LL, out.formula))
    throw InvariantBreach("lift rank " + std::to_string(out.u_max) + " disagrees with the dimension formula " +
                          std::to_string(out.formula));
  out.ws.assign(d, GFVector{});
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i) out.ws[i].insert(out.ws[i].end(), r.begin() + i * dim, r.begin() + (i + 1) * dim);
  return out;
}

struct DimenCheck {
  long long lhs = 0;  // n d - dim_F(D + W)
  long long rhs = 0;  // sum_i dim_F C_V(h_i) - m
  bool holds = false;
};

inline DimenCheck dimen_bound_check(const LiftContext& ctx, const std::vector<Elem>& hs) {
  const auto dw = build_dw(ctx, hs);
  DimenCheck c;
  c.lhs = static_cast<long long>(ctx.field.n * hs.size()) - static_cast<long long>(dw.dim_sum);
  for (Elem h : hs) c.rhs += static_cast<long long>(f_dim(fixed_space(ctx.act, h), ctx.field));
  c.rhs -= static_cast<long long>(ctx.der.m);
  c.holds = c.lhs >= c.rhs;
  return c;
}

/// A word over the generators of H: 1-based indices, negative for inverses.
inline Elem evaluate_word(const Group& h, const nlohmann::json& word) {
  if (!word.is_array()) throw InputError("a word must be an array of generator indices");
  const auto& gi = h.generator_indices();
  Elem x = Group::identity();
  for (const auto& t : word) {
    if (!t.is_number_integer()) throw InputError("word letters must be integers");
    const int k = t.get<int>();
    const auto idx = static_cast<std::size_t>(k < 0 ? -k : k);
    if (k == 0 || idx > gi.size()) throw InputError("word letter " + std::to_string(k) + " out of range");
    const Elem g = gi[idx - 1];
    x = h.mul(x, k < 0 ? h.inv(g) : g);
  }
  return x;
}

/// {"module": <module descriptor>, "u": int, "hs": [word, ...], "ws": [[int, ...], ...]}
/// "ws" may be omitted for rank queries.
inline std::pair<LiftContext, LiftProblem> load_lift_problem(const nlohmann::json& d, const Limits& limits = {}) {
  if (!d.is_object() || !d.contains("module")) throw InputError("lift descriptor needs a \"module\"");
  auto ctx = make_lift_context(load_module_action(d["module"], limits));
  LiftProblem pr;
  if (d.contains("u")) {
    const int u = json_int(d, "u");
    if (u < 0) throw InputError("u must be nonnegative");
    pr.u = static_cast<std::size_t>(u);
  }
  if (!d.contains("hs") || !d["hs"].is_array()) throw InputError("lift descriptor needs \"hs\"");
  for (const auto& w : d["hs"]) pr.hs.push_back(evaluate_word(ctx.act.group, w));
  if (d.contains("ws")) {
    for (const auto& w : d["ws"]) {
      if (!w.is_array()) throw InputError("each w_i must be an integer list");
      GFVector v;
      for (const auto& x : w) {
        if (!x.is_number_integer()) throw InputError("w entries must be integers");
        v.push_back(mod_p(x.get<long long>(), ctx.act.p));
      }
      pr.ws.push_back(std::move(v));
    }
  } else {
    pr.ws.assign(pr.hs.size(), GFVector(pr.u * ctx.act.dim, 0));
  }
  return {std::move(ctx), std::move(pr)};
}

}  // namespace invgen
