#include <gtest/gtest.h>

#include <cmath>

#include "bergelab/checkers/problem_checks.hpp"
#include "bergelab/corpus/corpus.hpp"
#include "bergelab/parametric/transforms.hpp"

using namespace bergelab;

namespace {

using ER = ExtReal<double>;

FixtureCase fixture_case(const std::string& name) { return corpus_instantiate(name).cases.at(0); }

template <class T>
Problem<T> fixture_problem(const std::string& name) {
  return compile_problem<T>(fixture_case(name).problem);
}

GridFunction<double> sampled(const std::function<double(double)>& f) {
  return GridFunction<double>::from(Grid1D<double>(-1, 1, 0.125), [&](const double& x) { return ER(f(x)); });
}

std::size_t index_of(const GridFunction<double>& g, double x) {
  for (std::size_t i = 0; i < g.xs.size(); ++i)
    if (g.xs[i] == x) return i;
  ADD_FAILURE() << "no grid point " << x;
  return 0;
}

Problem<double> abs_gap_problem() {
  ProblemSpec s;
  s.name = "abs-gap";
  s.mode = Mode::Float;
  s.x_lo = ExactScalar(0);
  s.x_hi = ExactScalar(1);
  s.y_lo = ExactScalar(0);
  s.y_hi = ExactScalar(1);
  s.objective = ex::abs(ex::x() - ex::y());
  s.phi = MultifunctionSpec::constant(ex::c(0), ex::c(1));
  return compile_problem<double>(s);
}

}  // namespace

TEST(FunctionChecks, StepIsNotLscAtJump) {
  auto f = sampled([](double x) { return x <= 0 ? 1.0 : 0.0; });
  auto v = check_lsc_fn_at(f, index_of(f, 0.0), 1e-6);
  ASSERT_TRUE(v.violated());
  ASSERT_TRUE(v.witness);
  EXPECT_TRUE(replay_fn_witness<double>(*v.witness, [](const double& x) { return ER(x <= 0 ? 1.0 : 0.0); }));
  EXPECT_FALSE(replay_fn_witness<double>(*v.witness, [](const double&) { return ER(1.0); }));
  EXPECT_FALSE(check_usc_fn_at(f, index_of(f, 0.0), 1e-6).violated());
}

TEST(FunctionChecks, ContinuousFunctionsPass) {
  for (auto fn : std::vector<std::function<double(double)>>{[](double) { return 3.0; }, [](double x) { return x; },
                                                            [](double x) { return x * x - 2 * x; }}) {
    auto f = sampled(fn);
    for (std::size_t i = 0; i < f.xs.size(); ++i) {
      EXPECT_FALSE(check_lsc_fn_at(f, i, 1e-6).violated()) << f.xs[i];
      EXPECT_FALSE(check_usc_fn_at(f, i, 1e-6).violated()) << f.xs[i];
    }
  }
}

TEST(FunctionChecks, UscFailsForOpenStep) {
  auto f = sampled([](double x) { return x < 0 ? 1.0 : 0.0; });
  EXPECT_TRUE(check_usc_fn_at(f, index_of(f, 0.0), 1e-6).violated());
  EXPECT_FALSE(check_lsc_fn_at(f, index_of(f, 0.0), 1e-6).violated());
}

TEST(ProbeSchedule, GeometricAndHarmonic) {
  auto params = make_params(Grid1D<double>(0, 1, 0.01));
  params.depth = 4;
  auto r = schedule_radii(params);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_EQ(r.front(), 0.5);
  EXPECT_EQ(r.back(), 0.5 / 16);
  params.harmonic_n = 10;
  r = schedule_radii(params);
  ASSERT_EQ(r.size(), 10u);
  EXPECT_EQ(r.back(), 0.1);
  EXPECT_NE(schedule_name(params).find("harmonic"), std::string::npos);
}

TEST(ProbeSchedule, JumpNeedsPersistentGap) {
  std::vector<double> radii{0.5, 0.25, 0.125, 0.0625};
  std::vector<ER> persistent{ER(1.0), ER(1.0), ER(1.0), ER(1.0)};
  EXPECT_TRUE(detect_jump(radii, persistent, 1e-6).violated);
  std::vector<ER> vanishing{ER(1.0), ER(0.5), ER(0.0), ER(0.0)};
  EXPECT_FALSE(detect_jump(radii, vanishing, 1e-6).violated);
}

TEST(ProblemChecks, VasquezValueNotLscAtOrigin) {
  auto c = fixture_case("vasquez");
  auto p = compile_problem<double>(c.problem);
  auto params = fixture_params<double>(c, 1);
  auto v = check_lisc(p, 0.0, params);
  ASSERT_TRUE(v.violated());
  ASSERT_TRUE(v.witness);
  const auto& w = *v.witness;
  EXPECT_EQ(w.kind, "lisc");
  ASSERT_GE(w.seq.size(), 3u);
  int harmonic_hits = 0;
  for (const auto& pt : w.seq) {
    ASSERT_TRUE(pt.y);
    double n = std::round(1 / pt.x);
    if (pt.x > 0 && std::fabs(pt.x - 1 / n) < 1e-12 && std::fabs(*pt.y - n) <= params.y_grid.step()) ++harmonic_hits;
    EXPECT_NEAR(pt.value.value(), 0.0, 0.05);
  }
  EXPECT_EQ(harmonic_hits, static_cast<int>(w.seq.size()));
  EXPECT_TRUE(replay_witness(p, w));
  EXPECT_FALSE(check_fptusc(p, 0.0, params).violated());
}

TEST(ProblemChecks, VasquezLevelSetUnbounded) {
  auto c = fixture_case("vasquez");
  auto p = compile_problem<double>(c.problem);
  auto params = fixture_params<double>(c, 1);
  params.harmonic_n = 0;
  auto v = check_k_inf_compact(p, -1.0, 1.0, 0.5, 0.01, params);
  ASSERT_TRUE(v.violated());
  EXPECT_TRUE(replay_witness(p, *v.witness));
  EXPECT_THROW(check_k_inf_compact(p, -3.0, 1.0, 0.5, 0.01, params), PreconditionFailed);
}

TEST(ProblemChecks, CompactLevelSetsPass) {
  auto p = abs_gap_problem();
  auto params = make_params(Grid1D<double>(0, 1, 0.01));
  EXPECT_FALSE(check_k_inf_compact(p, 0.0, 1.0, 0.5, 0.05, params).violated());
}

TEST(ProblemChecks, ModifiedOptimumCounterexampleFailsKn) {
  auto c = fixture_case("optimum-counterexample");
  auto p = compile_problem<double>(c.problem);
  auto params = fixture_params<double>(c, 1);
  params.seeds = {ex::c(Rational(1, 2))};
  auto mp = modified_problem(p, 1.0, 0.0, params.y_grid);
  auto v = check_kn_inf_compact(mp.problem, 0.0, params);
  ASSERT_TRUE(v.violated());
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->kind, "kn_cluster");
  for (const auto& pt : v.witness->seq) {
    ASSERT_TRUE(pt.y);
    EXPECT_EQ(*pt.y, 0.5);
  }
  EXPECT_TRUE(replay_witness(mp.problem, *v.witness));
  EXPECT_FALSE(check_lisc(p, 0.0, params).violated());
  EXPECT_FALSE(check_lmsc(p, 0.0, params).violated());
}

TEST(ProblemChecks, ContinuousObjectiveIsKnInfCompact) {
  auto p = abs_gap_problem();
  auto params = make_params(Grid1D<double>(0, 1, 0.01));
  for (double x : {0.0, 0.5, 1.0}) {
    EXPECT_FALSE(check_kn_inf_compact(p, x, params).violated()) << x;
    EXPECT_FALSE(check_lmsc(p, x, params).violated()) << x;
    EXPECT_FALSE(check_solutions_usc(p, x, params).violated()) << x;
  }
}

TEST(ProblemChecks, ExactIrrationalTailNotAttained) {
  auto c = fixture_case("lisc-not-lmsc");
  auto p = compile_problem<ExactScalar>(c.problem);
  auto params = fixture_params<ExactScalar>(c, 1);
  params.certified_value = ExactScalar(0);
  ExactScalar half(Rational(1, 2));
  EXPECT_FALSE(check_lisc(p, half, params).violated());
  auto v = check_lmsc(p, half, params);
  ASSERT_TRUE(v.violated());
  EXPECT_TRUE(replay_witness(p, *v.witness));
}

TEST(ProblemChecks, OutsideDomainRejected) {
  auto p = abs_gap_problem();
  auto params = make_params(Grid1D<double>(0, 1, 0.01));
  EXPECT_THROW(check_lisc(p, 2.0, params), PreconditionFailed);
}

TEST(Characterize, DirectChecksAgree) {
  for (const char* name : {"vasquez", "optimum-counterexample", "fptusc-not-epi-usc"}) {
    auto c = fixture_case(name);
    auto p = compile_problem<double>(c.problem);
    auto params = fixture_params<double>(c, 1);
    for (const auto& l : c.labels) {
      if (l.lambda) continue;
      double x = l.at.to_double();
      auto rep = characterize_continuity(p, x, params);
      EXPECT_TRUE(rep.consistent) << name << " at " << x;
    }
  }
  auto c = fixture_case("lsc-lmsc-independence");
  auto p = compile_problem<ExactScalar>(c.problem);
  auto rep = characterize_continuity(p, ExactScalar(Rational(1, 2)), fixture_params<ExactScalar>(c, 1));
  EXPECT_TRUE(rep.consistent);
  EXPECT_TRUE(rep.lisc.violated());
  EXPECT_TRUE(rep.direct_lsc.violated());
  EXPECT_FALSE(rep.fptusc.violated());
}

TEST(Characterize, VerdictJsonCarriesResolution) {
  auto c = fixture_case("vasquez");
  auto p = compile_problem<double>(c.problem);
  auto params = fixture_params<double>(c, 1);
  auto j = verdict_json(check_lisc(p, 0.0, params));
  EXPECT_EQ(j["status"], "Violated");
  EXPECT_TRUE(j.contains("resolution"));
  EXPECT_TRUE(j["witness"]["sequence"].is_array());
}
