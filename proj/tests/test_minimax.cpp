#include <gtest/gtest.h>

#include <random>

#include "bergelab/minimax/minimax.hpp"

using namespace bergelab;

namespace {

using EX = ExtReal<ExactScalar>;
using ER = ExtReal<double>;

ExactScalar q(long long n, long long d = 1) { return ExactScalar(Rational(n, d)); }

MinimaxSpec unit_spec(Mode mode, Expr f) {
  MinimaxSpec s;
  s.name = "t";
  s.mode = mode;
  s.x_lo = q(0);
  s.x_hi = q(1);
  s.a_lo = q(0);
  s.a_hi = q(1);
  s.b_lo = q(0);
  s.b_hi = q(1);
  s.f = std::move(f);
  s.phi_a = MultifunctionSpec::constant(ex::c(0), ex::c(1));
  s.phi_b = MultifunctionSpec::constant(ex::c(0), ex::c(1));
  s.x_step = q(1, 4);
  s.a_step = q(1, 8);
  s.b_step = q(1, 8);
  return s;
}

Expr sq(const Expr& e) { return e * e; }

/** Float instance on x in [-1, 1] whose worst loss is the given function of x alone. */
Minimax<double> step_instance(Expr f) {
  MinimaxSpec s = unit_spec(Mode::Float, std::move(f));
  s.x_lo = q(-1);
  s.x_step = q(1, 8);
  return compile_minimax<double>(s);
}

}  // namespace

TEST(WorstLoss, Examples) {
  auto m = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, ex::neg(sq(ex::a() - ex::b()))));
  EXPECT_EQ(worst_loss_at(m, q(0), q(1, 2), m.b_grid), EX(q(0)));
  auto c = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, ex::c(Rational(3, 7))));
  EXPECT_EQ(worst_loss_at(c, q(1, 2), q(1, 4), c.b_grid), EX(q(3, 7)));
  auto b = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, ex::b()));
  EXPECT_EQ(worst_loss_at(b, q(0), q(0), b.b_grid), EX(q(1)));
  EXPECT_THROW(worst_loss_at(b, q(0), q(2), b.b_grid), InfeasibleAction);
  EXPECT_THROW(worst_loss_at(b, q(2), q(0), b.b_grid), PreconditionFailed);
}

TEST(WorstLoss, EmptyBSetIsInfeasible) {
  MinimaxSpec s = unit_spec(Mode::Exact, ex::b());
  s.phi_b = MultifunctionSpec::constant(ex::a(), ex::c(Rational(1, 2)));
  s.phi_b.empty_allowed = true;
  auto m = compile_minimax<ExactScalar>(s);
  EXPECT_THROW(worst_loss_at(m, q(0), q(1), m.b_grid), InfeasibleAction);
}

TEST(Minimax, SquaredGap) {
  auto m = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, sq(ex::a() - ex::b())));
  EXPECT_EQ(minimax_at(m, q(1, 2), m.a_grid, m.b_grid), EX(q(1, 4)));
  auto sol = solution_sets_at(m, q(1, 2), m.a_grid, m.b_grid, q(0));
  EXPECT_EQ(sol.value, EX(q(1, 4)));
  ASSERT_EQ(sol.a_star, (std::vector<ExactScalar>{q(1, 2)}));
  for (const auto& r : sol.rows)
    if (r.a == q(1, 2)) {
      EXPECT_EQ(r.b_sharp, (std::vector<ExactScalar>{q(0), q(1)}));
    }
}

TEST(Minimax, SolutionSetsTrivialCases) {
  auto c = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, ex::c(2)));
  auto sol = solution_sets_at(c, q(0), c.a_grid, c.b_grid, q(0));
  EXPECT_EQ(sol.a_star.size(), c.a_grid.size());
  for (const auto& r : sol.rows) EXPECT_EQ(r.b_sharp.size(), c.b_grid.size());
  auto lin = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, ex::a()));
  EXPECT_EQ(solution_sets_at(lin, q(0), lin.a_grid, lin.b_grid, q(0)).a_star, (std::vector<ExactScalar>{q(0)}));
}

TEST(Minimax, IndependentOfBReducesToMinimization) {
  auto m = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, sq(ex::a() - ex::x())));
  Problem<ExactScalar> p = worst_loss_problem(m, m.b_grid);
  for (const auto& x : m.x_grid.points()) EXPECT_EQ(minimax_at(m, x, m.a_grid, m.b_grid), value_at(p, x, m.a_grid)) << x.str();
}

TEST(Minimax, RandomInstancesMatchNestedLoops) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::bernoulli_distribution coupled(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    int c[6];
    for (int& v : c) v = coef(rng);
    bool tri = coupled(rng);
    Expr f = ex::c(c[0]) + ex::c(c[1]) * ex::a() + ex::c(c[2]) * ex::b() + ex::c(c[3]) * ex::a() * ex::b() +
             ex::c(c[4]) * ex::a() * ex::a() + ex::c(c[5]) * ex::b() * ex::x();
    MinimaxSpec s = unit_spec(Mode::Exact, f);
    s.a_step = q(1, 4);
    s.b_step = q(1, 4);
    if (tri) s.phi_b = MultifunctionSpec::constant(ex::c(0), ex::a());
    auto m = compile_minimax<ExactScalar>(s);
    for (int xi = 0; xi <= 2; ++xi) {
      Rational x(xi, 2);
      std::optional<Rational> best;
      for (int ai = 0; ai <= 4; ++ai) {
        Rational a(ai, 4);
        std::optional<Rational> worst;
        for (int bi = 0; bi <= 4; ++bi) {
          Rational b(bi, 4);
          if (tri && b > a) continue;
          Rational v = c[0] + c[1] * a + c[2] * b + c[3] * a * b + c[4] * a * a + c[5] * b * x;
          if (!worst || *worst < v) worst = v;
        }
        if (!best || *worst < *best) best = worst;
      }
      EXPECT_EQ(minimax_at(m, ExactScalar(x), m.a_grid, m.b_grid), EX(ExactScalar(*best))) << trial;
      auto d = weak_duality_at(m, ExactScalar(x), m.a_grid, m.b_grid);
      EXPECT_EQ(d.rectangular, !tri);
      EXPECT_TRUE(d.holds);
      if (d.rectangular) {
        EXPECT_LE(d.max_min, d.min_max);
      }
    }
  }
}

TEST(Swap, TriangleMembership) {
  MinimaxSpec s = unit_spec(Mode::Exact, sq(ex::a() - ex::b()));
  s.phi_b = MultifunctionSpec::constant(ex::c(0), ex::a());
  auto m = compile_minimax<ExactScalar>(s);
  auto sw = swap_transform(m);
  EXPECT_EQ(sw.phi_a_sample(q(0), m.a_grid, m.b_grid), m.b_grid.points());
  for (const auto& b : m.b_grid.points()) {
    std::vector<ExactScalar> expect;
    for (const auto& a : m.a_grid.points())
      if (b <= a) expect.push_back(a);
    EXPECT_EQ(sw.phi_b_sample(q(0), b, m.a_grid), expect) << b.str();
    for (const auto& a : m.a_grid.points()) {
      EXPECT_EQ(sw.phi_b_contains(q(0), b, a), b <= a);
      EXPECT_EQ(sw.value(q(0), b, a), m.value(q(0), a, b));
    }
  }
}

TEST(Swap, IndependentBSetSwapsToA) {
  MinimaxSpec s = unit_spec(Mode::Exact, ex::a());
  s.phi_b = MultifunctionSpec::constant(ex::c(0), ex::c(Rational(1, 2)));
  auto m = compile_minimax<ExactScalar>(s);
  auto sw = swap_transform(m);
  EXPECT_EQ(sw.phi_b_sample(q(0), q(1, 4), m.a_grid), m.a_grid.points());
  EXPECT_TRUE(sw.phi_b_sample(q(0), q(3, 4), m.a_grid).empty());
}

TEST(ALsc, ConstantSetsPass) {
  auto m = compile_minimax<double>(unit_spec(Mode::Float, sq(ex::a() - ex::b())));
  auto params = minimax_params(m);
  params.depth = 6;
  for (double x : {0.0, 0.5, 1.0}) EXPECT_FALSE(check_a_lsc(m, x, params).violated()) << x;
}

TEST(ALsc, CollapsingSetViolates) {
  MinimaxSpec s = unit_spec(Mode::Float, ex::b());
  s.phi_b = MultifunctionSpec{};
  s.phi_b.pieces.push_back({ex::eq(ex::x(), ex::c(0)), ex::c(0), ex::c(1), true, true});
  s.phi_b.pieces.push_back({ex::truth(true), ex::c(0), ex::c(0), true, true});
  auto m = compile_minimax<double>(s);
  auto params = minimax_params(m);
  params.depth = 6;
  auto v = check_a_lsc(m, 0.0, params);
  ASSERT_TRUE(v.violated());
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->kind, "a_lsc");
  EXPECT_GT(*v.witness->y, 3 * m.b_grid.step());
  EXPECT_TRUE(replay_a_lsc(m, *v.witness));
  Witness<double> forged = *v.witness;
  forged.y = 0.0;
  EXPECT_FALSE(replay_a_lsc(m, forged));
  EXPECT_FALSE(check_a_lsc(m, 0.5, params).violated());
}

TEST(ALsc, TriangleFollowsA) {
  MinimaxSpec s = unit_spec(Mode::Float, ex::b());
  s.phi_b = MultifunctionSpec::constant(ex::c(0), ex::a());
  auto m = compile_minimax<double>(s);
  auto params = minimax_params(m);
  params.depth = 6;
  for (double x : {0.0, 0.5}) EXPECT_FALSE(check_a_lsc(m, x, params).violated()) << x;
}

TEST(BChecks, ContinuousInstancePasses) {
  auto m = compile_minimax<double>(unit_spec(Mode::Float, sq(ex::a() - ex::b()) + ex::x() * ex::a()));
  auto params = minimax_params(m);
  params.depth = 6;
  for (double x : {0.0, 0.5, 1.0}) {
    EXPECT_FALSE(check_b_uniform_fptusc(m, x, params).violated()) << x;
    EXPECT_FALSE(check_b_fptlisc(m, x, params).violated()) << x;
  }
}

TEST(BChecks, UpwardJumpBreaksUsc) {
  auto m = step_instance(ex::ind(ex::lt(ex::x(), ex::c(0))));
  auto params = minimax_params(m);
  params.depth = 6;
  auto v = check_b_uniform_fptusc(m, 0.0, params);
  EXPECT_TRUE(v.violated());
  EXPECT_NE(v.note.find("agrees"), std::string::npos) << v.note;
  EXPECT_FALSE(check_b_uniform_fptusc(m, 0.5, params).violated());
  auto closed = step_instance(ex::ind(ex::le(ex::x(), ex::c(0))));
  auto w = check_b_uniform_fptusc(closed, 0.0, params);
  EXPECT_FALSE(w.violated());
  EXPECT_NE(w.note.find("agrees"), std::string::npos) << w.note;
}

TEST(BChecks, DownwardJumpBreaksLisc) {
  auto m = step_instance(ex::ind(ex::le(ex::x(), ex::c(0))));
  auto params = minimax_params(m);
  params.depth = 6;
  auto v = check_b_fptlisc(m, 0.0, params);
  ASSERT_TRUE(v.violated());
  ASSERT_TRUE(v.witness);
  EXPECT_FALSE(v.witness->seq.empty());
  EXPECT_NE(v.note.find("agrees"), std::string::npos);
  EXPECT_TRUE(replay_witness(worst_loss_problem(m, m.b_grid), *v.witness));
}

TEST(BChecks, UnattainedOuterMinimum) {
  MinimaxSpec s = unit_spec(Mode::Float, ex::a());
  s.phi_a.pieces[0].closed_lower = false;
  auto m = compile_minimax<double>(s);
  auto params = minimax_params(m);
  params.depth = 6;
  params.certified_value = 0.0;
  EXPECT_FALSE(check_b_fptlisc(m, 0.5, params).violated());
  auto v = check_b_fptlmsc(m, 0.5, params);
  ASSERT_TRUE(v.violated());
  EXPECT_EQ(v.property, "b_fptlmsc");
  auto uncertified = minimax_params(m);
  uncertified.depth = 6;
  EXPECT_NE(check_b_fptlmsc(m, 0.5, uncertified).status, Status::Violated);
}

TEST(SwapKn, OneVerdictPerSampledB) {
  auto m = compile_minimax<double>(unit_spec(Mode::Float, sq(ex::a() - ex::b())));
  auto params = minimax_params(m);
  params.depth = 4;
  auto entries = swap_kn_diagnostic(m, 0.5, params);
  EXPECT_EQ(entries.size(), 9u);
  for (const auto& e : entries) EXPECT_EQ(e.verdict.property, "kn_inf_compact");
}

TEST(Profile, WorkerInvariant) {
  auto m = compile_minimax<ExactScalar>(unit_spec(Mode::Exact, sq(ex::a() - ex::b()) + ex::x() * ex::a()));
  auto one = compute_minimax_profile(m, q(0), 1);
  auto three = compute_minimax_profile(m, q(0), 3);
  EXPECT_EQ(one.values, three.values);
  EXPECT_EQ(one.a_star, three.a_star);
  EXPECT_EQ(one.surface, three.surface);
  EXPECT_EQ(one.xs.size(), m.x_grid.size());
}

TEST(MinimaxFile, LoadsAndReportsErrors) {
  const std::string text = R"({"name": "toy", "mode": "exact",
    "x_domain": {"lo": 0, "hi": 1}, "a_domain": {"lo": 0, "hi": 1}, "b_domain": {"lo": 0, "hi": 1},
    "f": ["mul", ["sub", "a", "b"], ["sub", "a", "b"]],
    "phi_A": {"lower": 0, "upper": 1},
    "phi_B": {"lower": 0, "upper": ["max", "x", "a"]},
    "grid": {"x_step": "1/4", "a_step": "1/8", "b_step": "1/8"}})";
  MinimaxSpec s = load_minimax_text(text, "toy.json");
  auto m = compile_minimax<ExactScalar>(s);
  EXPECT_EQ(m.b_grid.step(), q(1, 8));
  EXPECT_EQ(worst_loss_at(m, q(1), q(0), m.b_grid), EX(q(1)));
  const std::string bad = "{\n  \"name\": \"toy\",\n  \"f\": [\"bogus\"]\n}\n";
  try {
    load_minimax_text(bad, "bad.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:"), std::string::npos) << e.what();
  }
  const std::string float_rational = R"({"mode": "float", "x_domain": {"lo": 0, "hi": 1}, "a_domain": {"lo": 0, "hi": 1},
    "b_domain": {"lo": 0, "hi": 1}, "f": ["ind", ["rational", "a"]], "phi_A": {"lower": 0, "upper": 1},
    "phi_B": {"lower": 0, "upper": 1}})";
  EXPECT_THROW(load_minimax_text(float_rational, "m.json"), ConfigError);
}
