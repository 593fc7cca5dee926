#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>

#include "bergelab/core/grid.hpp"
#include "bergelab/core/multifunction.hpp"
#include "bergelab/core/parallel.hpp"

using namespace bergelab;

using ER = ExtReal<double>;
using EX = ExtReal<ExactScalar>;

TEST(ExtReal, AdditionAbsorbsInfinity) {
  EXPECT_TRUE(ext_add(ER::pos_inf(), ER(3.0)).is_pos_inf());
  EXPECT_TRUE(ext_add(ER(3.0), ER::neg_inf()).is_neg_inf());
  EXPECT_EQ(ext_add(ER(2.0), ER(5.0)), ER(7.0));
}

TEST(ExtReal, OppositeInfinitiesAreIndeterminate) {
  EXPECT_THROW(ext_add(ER::pos_inf(), ER::neg_inf()), IndeterminateForm);
  EXPECT_THROW(ext_add(ER::neg_inf(), ER::pos_inf()), IndeterminateForm);
  EXPECT_THROW(ext_sub(ER::pos_inf(), ER::pos_inf()), IndeterminateForm);
  EXPECT_THROW(ext_mul(ER(0.0), ER::pos_inf()), IndeterminateForm);
}

TEST(ExtReal, TotalOrder) {
  std::vector<ER> xs{ER::pos_inf(), ER(1.0), ER::neg_inf(), ER(-7.5), ER(0.0)};
  std::sort(xs.begin(), xs.end());
  EXPECT_TRUE(xs.front().is_neg_inf());
  EXPECT_TRUE(xs.back().is_pos_inf());
  EXPECT_EQ(xs[1], ER(-7.5));
  EXPECT_EQ(xs[2], ER(0.0));
  EXPECT_EQ(xs[3], ER(1.0));
}

TEST(ExtReal, MinMaxReturnElements) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(0, 12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ER> xs;
    for (int k = 0; k < 5; ++k) {
      int v = pick(rng);
      xs.push_back(v == 0 ? ER::neg_inf() : v == 12 ? ER::pos_inf() : ER(static_cast<double>(v)));
    }
    ER lo = xs[0], hi = xs[0];
    for (const auto& v : xs) {
      lo = ext_min(lo, v);
      hi = ext_max(hi, v);
    }
    EXPECT_NE(std::find(xs.begin(), xs.end(), lo), xs.end());
    EXPECT_NE(std::find(xs.begin(), xs.end(), hi), xs.end());
    for (const auto& v : xs) {
      EXPECT_LE(lo, v);
      EXPECT_LE(v, hi);
    }
  }
}

TEST(ExactScalar, RationalityExhaustive) {
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b) {
      ExactScalar v(Rational(a, 4), Rational(b, 4));
      EXPECT_EQ(v.is_rational(), b == 0) << v.str();
    }
}

TEST(ExactScalar, ComparisonAgreesWithFloat) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-200, 200);
  std::uniform_int_distribution<int> den(1, 40);
  int checked = 0;
  while (checked < 1000) {
    ExactScalar p(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
    ExactScalar q(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
    double dp = p.to_double(), dq = q.to_double();
    if (std::fabs(dp - dq) <= 1e-9) continue;
    ++checked;
    EXPECT_EQ(p < q, dp < dq) << p.str() << " vs " << q.str();
    EXPECT_EQ(q < p, dq < dp) << q.str() << " vs " << p.str();
  }
}

TEST(ExactScalar, FieldArithmetic) {
  ExactScalar r2 = ExactScalar::sqrt2();
  EXPECT_EQ(r2 * r2, ExactScalar(2));
  ExactScalar half_r2(Rational(0), Rational(1, 2));
  EXPECT_EQ(ExactScalar(1) / r2, half_r2);
  EXPECT_EQ((ExactScalar(1) + r2) - r2, ExactScalar(1));
  EXPECT_EQ(-(ExactScalar(Rational(1, 3)) + r2), ExactScalar(Rational(-1, 3), Rational(-1)));
  EXPECT_THROW(ExactScalar(1) / ExactScalar(0), DivisionByZero);
  EXPECT_LT(ExactScalar(Rational(141, 100)), r2);
  EXPECT_LT(r2, ExactScalar(Rational(142, 100)));
}

TEST(ExactScalar, ParseForms) {
  EXPECT_EQ(parse_exact("1/2"), ExactScalar(Rational(1, 2)));
  EXPECT_EQ(parse_exact("0.25"), ExactScalar(Rational(1, 4)));
  EXPECT_EQ(parse_exact("sqrt2"), ExactScalar::sqrt2());
  EXPECT_EQ(parse_exact("1/2*sqrt2"), ExactScalar(Rational(0), Rational(1, 2)));
  EXPECT_EQ(parse_exact("1+3*sqrt2"), ExactScalar(Rational(1), Rational(3)));
  EXPECT_EQ(parse_exact(parse_exact("-2/3+1/5*sqrt2").str()), ExactScalar(Rational(-2, 3), Rational(1, 5)));
  EXPECT_THROW(parse_exact("abc"), ValidationError);
}

TEST(Grid1D, PointsInvariants) {
  Grid1D<double> g(0.0, 1.0, 0.3);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g[3], 0.9);
  EXPECT_LT(g.hi() - g.points().back(), g.step());
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);

  Grid1D<ExactScalar> e(ExactScalar(0), ExactScalar(1), ExactScalar(Rational(1, 3)));
  ASSERT_EQ(e.size(), 4u);
  EXPECT_EQ(e[3], ExactScalar(1));

  Grid1D<double> single(2.0, 2.0, 1.0);
  EXPECT_EQ(single.size(), 1u);
  EXPECT_THROW(Grid1D<double>(1.0, 0.0, 0.1), ValidationError);
  EXPECT_THROW(Grid1D<double>(0.0, 1.0, 0.0), ValidationError);
}

TEST(Grid1D, RefinementContainsOriginal) {
  for (auto step : {Rational(1, 3), Rational(1, 10), Rational(2, 7)}) {
    Grid1D<ExactScalar> g(ExactScalar(-1), ExactScalar(2), ExactScalar(step));
    Grid1D<ExactScalar> r = g.refined();
    for (const auto& p : g.points()) EXPECT_TRUE(std::binary_search(r.points().begin(), r.points().end(), p)) << p.str();
  }
  Grid1D<double> g(0.0, 8.0, 0.25);
  Grid1D<double> r = g.refined();
  for (double p : g.points()) EXPECT_TRUE(std::binary_search(r.points().begin(), r.points().end(), p));
}

TEST(Interval, MembershipRespectsFlags) {
  Interval<double> iv{ER(0.0), ER(1.0), false, true};
  EXPECT_FALSE(iv.contains(0.0));
  EXPECT_TRUE(iv.contains(1.0));
  EXPECT_TRUE(iv.contains(0.5));
  EXPECT_FALSE(iv.contains(1.5));
  Interval<double> pt = Interval<double>::closed(1.0, 1.0);
  EXPECT_FALSE(pt.is_empty());
  EXPECT_TRUE(pt.contains(1.0));
  Interval<double> open_pt{ER(1.0), ER(1.0), false, true};
  EXPECT_TRUE(open_pt.is_empty());
  EXPECT_TRUE(Interval<double>::empty().is_empty());
  EXPECT_EQ(iv.distance(3.0), ER(2.0));
  EXPECT_EQ(iv.distance(0.5), ER(0.0));
  EXPECT_TRUE(Interval<double>::empty().distance(0.0).is_pos_inf());
}

TEST(Multifunction, OptimumCounterexampleFeasibleSet) {
  MultifunctionSpec m;
  m.pieces.push_back({ex::eq(ex::x(), ex::c(0)), ex::c(1), ex::c(1), true, true});
  m.pieces.push_back({ex::truth(true), ex::c(0), ex::c(1), true, true});
  Interval<ExactScalar> at0 = phi_at(m, ExactScalar(0));
  EXPECT_EQ(at0.lo, EX(ExactScalar(1)));
  EXPECT_EQ(at0.hi, EX(ExactScalar(1)));
  Interval<ExactScalar> half = phi_at(m, ExactScalar(Rational(1, 2)));
  EXPECT_EQ(half.lo, EX(ExactScalar(0)));
  EXPECT_EQ(half.hi, EX(ExactScalar(1)));
}

TEST(Multifunction, BoundedInventoryFeasibleSet) {
  // [0, min(L, M - x)] with L = 2, M = 3
  MultifunctionSpec m = MultifunctionSpec::constant(ex::c(0), ex::min(ex::c(2), ex::c(3) - ex::x()));
  Interval<double> iv = phi_at(m, 2.0);
  EXPECT_EQ(iv.lo, ER(0.0));
  EXPECT_EQ(iv.hi, ER(1.0));
}

TEST(Multifunction, EmptyAndUnmatched) {
  MultifunctionSpec m = MultifunctionSpec::constant(ex::x(), ex::c(0));
  EXPECT_THROW(phi_at(m, 1.0), EmptyNotAllowed);
  m.empty_allowed = true;
  EXPECT_TRUE(phi_at(m, 1.0).is_empty());
  MultifunctionSpec g;
  g.pieces.push_back({ex::lt(ex::x(), ex::c(0)), ex::c(0), ex::c(1), true, true});
  EXPECT_THROW(phi_at(g, 1.0), NoGuardMatched);
}

TEST(Multifunction, GuardOnAction) {
  MultifunctionSpec m = MultifunctionSpec::constant(ex::c(0), ex::a());
  Interval<double> iv = phi_at(m, Env<double>::of_xa(0.3, 0.7));
  EXPECT_EQ(iv.hi, ER(0.7));
  EXPECT_THROW(phi_at(m, 0.3), UnboundVariable);
}

TEST(Parallel, EveryIndexOnceAndErrorsPropagate) {
  for (unsigned w : {1u, 3u, 8u}) {
    std::vector<int> hits(101, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, w);
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  EXPECT_THROW(parallel_for(
                   10,
                   [](std::size_t i) {
                     if (i == 4) throw PreconditionFailed("test", "op", "boom");
                   },
                   4),
               PreconditionFailed);
}

TEST(Parallel, WorkerCountFromEnvironment) {
  setenv("BERGELAB_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  setenv("BERGELAB_WORKERS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("BERGELAB_WORKERS");
}
