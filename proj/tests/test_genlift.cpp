#include <gtest/gtest.h>

#include <iostream>
#include <random>

#include "invgen/battery.hpp"
#include "invgen/genlift.hpp"
#include "invgen/oracle.hpp"
#include "invgen/semidirect.hpp"

using namespace invgen;

namespace {

LiftContext context(const std::string& name) {
  for (auto& nm : module_battery())
    if (nm.name == name) return make_lift_context(nm.act);
  throw std::runtime_error("no module " + name);
}

Elem cyc(const Group& g, std::vector<int> c) { return g.index_of(Permutation::from_cycles(g.degree(), {c})); }

std::vector<GFVector> split_ws(std::size_t code, std::size_t d, std::size_t len, int p) {
  auto flat = decode_vector(code, p, d * len);
  std::vector<GFVector> ws;
  for (std::size_t i = 0; i < d; ++i) ws.emplace_back(flat.begin() + i * len, flat.begin() + (i + 1) * len);
  return ws;
}

std::vector<Elem> lifted(const Group& amb, const AffineLift& lift, const LiftProblem& pr) {
  std::vector<Elem> out;
  for (std::size_t i = 0; i < pr.hs.size(); ++i) out.push_back(amb.index_of(lift.element(pr.hs[i], pr.ws[i])));
  return out;
}

std::vector<Elem> invariable_tuple(const LiftContext& ctx) {
  auto t = short_invariable_tuple(ctx.coverage);
  if (!t) throw std::runtime_error("no invariably generating pair");
  return *t;
}

}  // namespace

TEST(DW, NegationOnGF3) {
  auto ctx = context("C_2 on GF(3)");
  auto dw = build_dw(ctx, {1});
  EXPECT_EQ(dw.dim_W, 1u);
  EXPECT_EQ(dw.dim_D, 1u);
  EXPECT_EQ(dw.dim_sum, 1u);
  EXPECT_THROW(build_dw(ctx, {0}), PreconditionError);
}

TEST(DW, Sym3Dimensions) {
  auto ctx = context("Sym(3) on GF(2)^2");
  const auto& h = ctx.act.group;
  std::vector<Elem> hs{cyc(h, {1, 2, 3}), cyc(h, {1, 2})};
  auto dw = build_dw(ctx, hs);
  EXPECT_EQ(f_dim(fixed_space(ctx.act, hs[0]), ctx.field), 0u);
  EXPECT_EQ(f_dim(fixed_space(ctx.act, hs[1]), ctx.field), 1u);
  EXPECT_EQ(dw.dim_W, 3u);
  EXPECT_EQ(dw.dim_D, ctx.field.n + ctx.der.m);
  EXPECT_LE(dw.dim_sum, dw.dim_W + ctx.der.m);
}

TEST(DW, Invariants) {
  for (auto& nm : module_battery()) {
    if (!nm.act.irreducible || nm.act.group.is_trivial()) continue;
    auto ctx = make_lift_context(nm.act);
    auto hs = ctx.act.group.generator_indices();
    auto dw = build_dw(ctx, hs);
    EXPECT_EQ(dw.dim_D, ctx.field.n + ctx.der.m) << nm.name;
    std::size_t w = 0;
    for (Elem h : hs) w += ctx.field.n - f_dim(fixed_space(ctx.act, h), ctx.field);
    EXPECT_EQ(dw.dim_W, w) << nm.name;
    EXPECT_LE(dw.dim_sum, dw.dim_W + ctx.der.m) << nm.name;
  }
}

TEST(GenCriterion, Degenerate) {
  auto ctx = context("Sym(3) on GF(2)^2");
  const auto& h = ctx.act.group;
  LiftProblem pr{0, {cyc(h, {1, 2, 3}), cyc(h, {1, 2})}, {{}, {}}};
  EXPECT_TRUE(gen_criterion(ctx, pr));
  EXPECT_TRUE(invgen_criterion(ctx, pr));
  pr.u = 1;
  pr.ws = {{0, 0}, {0, 0}};
  EXPECT_FALSE(gen_criterion(ctx, pr));
  EXPECT_FALSE(invgen_criterion(ctx, pr));
  LiftProblem bad{1, {cyc(h, {1, 2, 3})}, {{1, 0}}};
  EXPECT_THROW(gen_criterion(ctx, bad), PreconditionError);
}

TEST(GenCriterion, C3OnGF4NeverLifts) {
  auto ctx = context("C_3 on GF(2)^2");
  AffineLift lift(ctx.act, 1);
  auto amb = lift.group();
  ASSERT_EQ(amb.order(), 12u);
  for (std::size_t c = 0; c < 4; ++c) {
    LiftProblem pr{1, {1}, {decode_vector(c, 2, 2)}};
    EXPECT_FALSE(gen_criterion(ctx, pr));
    EXPECT_FALSE(generates(amb, lifted(amb, lift, pr)));
  }
}

TEST(InvgenCriterion, Sym3AllSixteen) {
  auto ctx = context("Sym(3) on GF(2)^2");
  const auto& h = ctx.act.group;
  AffineLift lift(ctx.act, 1);
  auto amb = lift.group();
  ASSERT_EQ(amb.order(), 24u);
  std::vector<Elem> hs{cyc(h, {1, 2, 3}), cyc(h, {1, 2})};
  int agree = 0;
  for (std::size_t code = 0; code < 16; ++code) {
    LiftProblem pr{1, hs, split_ws(code, 2, 2, 2)};
    auto xs = lifted(amb, lift, pr);
    EXPECT_EQ(invgen_criterion(ctx, pr), oracle::invariably_generates_exhaustive(amb, xs)) << code;
    EXPECT_EQ(gen_criterion(ctx, pr), generates(amb, xs)) << code;
    ++agree;
  }
  EXPECT_EQ(agree, 16);
}

// The central soundness run: both criteria against the constructed group.
TEST(Criteria, CrossValidation) {
  std::mt19937_64 rng(2024);
  std::size_t checked = 0, gen_true = 0, inv_true = 0;
  for (auto& nm : module_battery()) {
    if (!nm.act.irreducible || !nm.act.faithful) continue;
    auto ctx = make_lift_context(nm.act);
    const auto vsize = ctx.act.module_order();
    auto gen_hs = ctx.act.group.generator_indices();
    auto inv_hs = invariable_tuple(ctx);
    for (std::size_t u = 1; u <= 3; ++u) {
      std::size_t vu = 1;
      for (std::size_t i = 0; i < u; ++i) vu *= vsize;
      if (vu > 256 || vu * ctx.act.group.order() > 2000) break;
      AffineLift lift(ctx.act, u);
      auto amb = lift.group();
      for (const auto* hs : {&gen_hs, &inv_hs}) {
        const bool inv_mode = hs == &inv_hs;
        const std::size_t d = hs->size(), len = u * ctx.act.dim;
        std::size_t total = 1;
        for (std::size_t i = 0; i < d * len; ++i) total *= static_cast<std::size_t>(ctx.act.p);
        const bool exhaustive = total <= 256;
        const std::size_t runs = exhaustive ? total : 60;
        for (std::size_t k = 0; k < runs; ++k) {
          const std::size_t code = exhaustive ? k : std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
          LiftProblem pr{u, *hs, split_ws(code, d, len, ctx.act.p)};
          auto xs = lifted(amb, lift, pr);
          if (!inv_mode) {
            const bool v = gen_criterion(ctx, pr);
            ASSERT_EQ(v, generates(amb, xs)) << nm.name << " u=" << u;
            gen_true += v;
          } else {
            const bool v = invgen_criterion(ctx, pr);
            ASSERT_EQ(v, oracle::invariably_generates_literal(amb, xs)) << nm.name << " u=" << u;
            inv_true += v;
          }
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 500u);
  EXPECT_GT(gen_true, 50u);
  EXPECT_GT(inv_true, 50u);
  std::cout << "checked " << checked << ", generating " << gen_true << ", invariable " << inv_true << "\n";
}

TEST(MaxLiftRank, Examples) {
  auto neg = context("C_2 on GF(3)");
  EXPECT_EQ(max_lift_rank(neg, {1}, LiftMode::generate).u_max, 0u);
  EXPECT_EQ(max_lift_rank(neg, {1}, LiftMode::invariably_generate).u_max, 0u);
  auto ctx = context("Sym(3) on GF(2)^2");
  const auto& h = ctx.act.group;
  std::vector<Elem> hs{cyc(h, {1, 2, 3}), cyc(h, {1, 2})};
  auto r = max_lift_rank(ctx, hs, LiftMode::invariably_generate);
  EXPECT_EQ(static_cast<long long>(r.u_max), 4 - static_cast<long long>(build_dw(ctx, hs).dim_sum));
  EXPECT_EQ(r.u_max, 1u);
  auto g = max_lift_rank(ctx, hs, LiftMode::generate);
  EXPECT_EQ(g.u_max, 2u);
}

TEST(MaxLiftRank, WitnessesAndOptimality) {
  for (auto& nm : module_battery()) {
    if (!nm.act.irreducible || !nm.act.faithful) continue;
    auto ctx = make_lift_context(nm.act);
    const auto vsize = ctx.act.module_order();
    for (auto mode : {LiftMode::generate, LiftMode::invariably_generate}) {
      auto hs = mode == LiftMode::generate ? ctx.act.group.generator_indices() : invariable_tuple(ctx);
      auto r = max_lift_rank(ctx, hs, mode);
      LiftProblem pr{r.u_max, hs, r.ws};
      EXPECT_TRUE(mode == LiftMode::generate ? gen_criterion(ctx, pr) : invgen_criterion(ctx, pr)) << nm.name;
      // u_max + 1 admits no witness
      const std::size_t u = r.u_max + 1, d = hs.size(), len = u * ctx.act.dim;
      double combos = 1;
      for (std::size_t i = 0; i < d * u; ++i) combos *= static_cast<double>(vsize);
      std::mt19937_64 rng(77);
      const bool exhaustive = combos <= 65536;
      const std::size_t runs = exhaustive ? static_cast<std::size_t>(combos) : 1000;
      for (std::size_t k = 0; k < runs; ++k) {
        std::vector<GFVector> ws(d, GFVector(len));
        if (exhaustive) {
          ws = split_ws(k, d, len, ctx.act.p);
        } else {
          std::uniform_int_distribution<int> e(0, ctx.act.p - 1);
          for (auto& w : ws)
            for (auto& x : w) x = e(rng);
        }
        LiftProblem bad{u, hs, ws};
        ASSERT_FALSE(mode == LiftMode::generate ? gen_criterion(ctx, bad) : invgen_criterion(ctx, bad)) << nm.name;
      }
    }
  }
}

TEST(MaxLiftRank, Sym3ExhaustiveAtBoundary) {
  auto ctx = context("Sym(3) on GF(2)^2");
  const auto& h = ctx.act.group;
  std::vector<Elem> hs{cyc(h, {1, 2, 3}), cyc(h, {1, 2})};
  auto r = max_lift_rank(ctx, hs, LiftMode::invariably_generate);
  for (std::size_t u : {r.u_max, r.u_max + 1}) {
    AffineLift lift(ctx.act, u);
    auto amb = lift.group();
    bool any = false;
    const std::size_t len = u * 2, total = std::size_t{1} << (2 * len);
    for (std::size_t code = 0; code < total && !any; ++code) {
      LiftProblem pr{u, hs, split_ws(code, 2, len, 2)};
      any = oracle::invariably_generates_literal(amb, lifted(amb, lift, pr));
    }
    EXPECT_EQ(any, u == r.u_max) << "u=" << u;
  }
}

TEST(Dimen, Examples) {
  auto neg = context("C_2 on GF(3)");
  auto c = dimen_bound_check(neg, {1});
  EXPECT_EQ(c.lhs, 0);
  EXPECT_EQ(c.rhs, 0);
  EXPECT_TRUE(c.holds);
  auto ctx = context("Sym(3) on GF(2)^2");
  const auto& h = ctx.act.group;
  auto with_id = dimen_bound_check(ctx, {cyc(h, {1, 2, 3}), cyc(h, {1, 2}), 0});
  auto without = dimen_bound_check(ctx, {cyc(h, {1, 2, 3}), cyc(h, {1, 2})});
  EXPECT_EQ(with_id.rhs - without.rhs, static_cast<long long>(ctx.field.n));
}

TEST(Dimen, Randomized) {
  std::vector<LiftContext> ctxs;
  for (auto& nm : module_battery())
    if (nm.act.irreducible) ctxs.push_back(make_lift_context(nm.act));
  std::mt19937_64 rng(31337);
  int done = 0;
  while (done < 1000) {
    const auto& ctx = ctxs[rng() % ctxs.size()];
    const auto& h = ctx.act.group;
    std::vector<Elem> hs(1 + rng() % 4);
    for (auto& x : hs) x = static_cast<Elem>(rng() % h.order());
    if (!generates(h, hs)) continue;
    auto c = dimen_bound_check(ctx, hs);
    ASSERT_TRUE(c.holds) << ctx.act.group.name() << " lhs=" << c.lhs << " rhs=" << c.rhs;
    ++done;
  }
}

TEST(InvgenCriterion, ConjugationRobust) {
  std::mt19937_64 rng(8);
  for (const char* name : {"Sym(3) on GF(2)^2", "C_3 on GF(7)", "C_7 on GF(2)^3", "Alt(4) on GF(3)^3"}) {
    auto ctx = context(name);
    AffineLift lift(ctx.act, 1);
    auto amb = lift.group();
    auto hs = invariable_tuple(ctx);
    for (int inst = 0; inst < 10; ++inst) {
      LiftProblem pr{1, hs, {}};
      for (std::size_t i = 0; i < hs.size(); ++i) {
        GFVector w(ctx.act.dim);
        for (auto& x : w) x = static_cast<int>(rng() % static_cast<unsigned>(ctx.act.p));
        pr.ws.push_back(w);
      }
      const bool verdict = invgen_criterion(ctx, pr);
      auto xs = lifted(amb, lift, pr);
      for (int c = 0; c < 50; ++c) {
        LiftProblem q{1, {}, {}};
        for (Elem x : xs) {
          auto [h, w] = lift.decompose(amb.element(amb.conj(x, static_cast<Elem>(rng() % amb.order()))));
          q.hs.push_back(h);
          q.ws.push_back(w);
        }
        ASSERT_EQ(invgen_criterion(ctx, q), verdict) << name;
      }
    }
  }
}

TEST(LiftDescriptor, Parses) {
  auto j = nlohmann::json::parse(R"({"module":{"group":{"family":"sym","n":3},"p":2,"dim":2,
      "matrices":[[[0,1],[1,0]],[[0,1],[1,1]]]},"u":1,"hs":[[2],[1]],"ws":[[1,0],[0,0]]})");
  auto [ctx, pr] = load_lift_problem(j);
  EXPECT_EQ(pr.hs.size(), 2u);
  EXPECT_EQ(pr.hs[0], ctx.act.group.generator_indices()[1]);
  EXPECT_EQ(pr.ws[0], (GFVector{1, 0}));
  auto bad = j;
  bad["hs"] = nlohmann::json::parse("[[3]]");
  EXPECT_THROW(load_lift_problem(bad), InputError);
}
