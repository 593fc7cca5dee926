#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bergelab/inventory/solver.hpp"

using namespace bergelab;

namespace {

InventoryModel lost_sales_zero_demand() {
  InventoryModel m;
  m.backorders = false;
  m.c1 = 1;
  m.c2 = 1;
  m.alpha = 1;
  m.demand = {{0, 1}};
  return m;
}

InventoryModel tiny_model() {
  InventoryModel m;
  m.L = 2;
  m.M = 2;
  m.c1 = 1;
  m.c2 = 1;
  m.alpha = 1;
  m.demand = {{0, 0.5}, {1, 0.5}};
  return m;
}

/** Best expected cost from every state over all Markov policies, by explicit product enumeration. */
std::vector<double> brute_force(const InventoryModel& m, int horizon, const std::vector<double>& xs, double cap_hi) {
  const std::size_t n = xs.size();
  std::vector<std::vector<double>> orders(n);
  for (std::size_t i = 0; i < n; ++i) {
    double cap = std::min({m.L, m.M - xs[i], cap_hi - xs[i]});
    for (double y = 0; y <= cap + 1e-12; y += 1) orders[i].push_back(y);
  }
  std::size_t per_stage = 1;
  for (const auto& o : orders) per_stage *= o.size();
  std::size_t total = 1;
  for (int t = 0; t < horizon; ++t) total *= per_stage;
  auto index = [&](double z) {
    for (std::size_t i = 0; i < n; ++i)
      if (std::fabs(xs[i] - z) < 1e-12) return i;
    ADD_FAILURE() << "state off grid " << z;
    return std::size_t{0};
  };
  std::vector<double> best(n, kInf);
  std::vector<std::vector<std::size_t>> pick(static_cast<std::size_t>(horizon), std::vector<std::size_t>(n));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (auto& stage : pick)
      for (std::size_t i = 0; i < n; ++i) {
        stage[i] = c % orders[i].size();
        c /= orders[i].size();
      }
    std::vector<double> v(n, 0.0);
    for (int left = 1; left <= horizon; ++left) {
      std::vector<double> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        double y = orders[i][pick[static_cast<std::size_t>(left - 1)][i]];
        double acc = (y > 0 ? m.c1 : 0.0) + m.c2 * y;
        for (const auto& a : m.demand) {
          double z = std::max(0.0, xs[i] + y - a.d);
          acc += a.p * (std::fabs(z) + m.alpha * v[index(z)]);
        }
        next[i] = acc;
      }
      v = next;
    }
    for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], v[i]);
  }
  return best;
}

}  // namespace

TEST(Transition, ClampDependsOnRegime) {
  InventoryModel lost;
  EXPECT_EQ(transition(lost, 1, 0, 3), 0.0);
  EXPECT_EQ(transition(lost, 2, 1, 1), 2.0);
  InventoryModel back;
  back.backorders = true;
  EXPECT_EQ(transition(back, 1, 0, 3), -2.0);
  InventoryModel capped = tiny_model();
  EXPECT_THROW(transition(capped, 1, 2, 0), InfeasibleOrder);
  EXPECT_THROW(transition(lost, 1, 0, -1), InfeasibleOrder);
}

TEST(FeasibleOrders, VariantTable) {
  InventoryModel m;
  m.L = 2;
  m.M = 3;
  auto iv = feasible_orders(m, 2);
  EXPECT_EQ(iv.lo, 0.0);
  EXPECT_EQ(iv.hi, 1.0);
  m.M = kInf;
  for (double x : {0.0, 5.0, 100.0}) EXPECT_EQ(feasible_orders(m, x).hi, 2.0);
  m.L = kInf;
  m.M = 3;
  EXPECT_EQ(feasible_orders(m, 1).hi, 2.0);
  m.M = kInf;
  m.c2 = 2;
  EXPECT_EQ(feasible_orders(m, 1, 10.0).hi, 5.0);
  EXPECT_TRUE(std::isinf(feasible_orders(m, 1).hi));
  EXPECT_EQ(m.variant(), InventoryVariant::UnlimitedOrdersUnlimitedCapacity);
}

TEST(FeasibleOrders, StateOutOfRange) {
  InventoryModel m = tiny_model();
  EXPECT_THROW(feasible_orders(m, 3), StateOutOfRange);
  EXPECT_THROW(feasible_orders(m, -1), StateOutOfRange);
  m.backorders = true;
  EXPECT_NO_THROW(feasible_orders(m, -1));
}

TEST(SigmaPath, Branches) {
  for (double z : {-3.0, 0.0, 1.5, 7.0}) EXPECT_EQ(sigma_path(1, 0, z), 0.0);
  EXPECT_EQ(sigma_path(1, 2, 2), 1.0);
  EXPECT_EQ(sigma_path(1, 2, 0.5), 2.0);
  EXPECT_EQ(sigma_path(1, 2, 1), 2.0);
  EXPECT_EQ(sigma_path(1, 2, 4), 0.0);
}

TEST(SigmaPath, LipschitzAndFeasibleWithoutCapacity) {
  InventoryModel m;
  m.L = 2;
  auto r = sigma_feasibility(m, Grid1D<double>(0, 4, 0.25), 0.25);
  EXPECT_GT(r.checked, 0u);
  EXPECT_EQ(r.infeasible, 0u);
  EXPECT_EQ(r.discontinuous, 0u);
}

TEST(SigmaPath, FeasibleInEveryVariant) {
  for (auto [L, M] : {std::pair{2.0, 3.0}, std::pair{kInf, 3.0}, std::pair{2.0, kInf}, std::pair{kInf, kInf}}) {
    InventoryModel m;
    m.L = L;
    m.M = M;
    auto r = sigma_feasibility(m, Grid1D<double>(0, 3, 0.25), 0.25);
    EXPECT_GT(r.checked, 0u);
    EXPECT_EQ(r.infeasible, 0u) << variant_name(m.variant());
    EXPECT_EQ(r.discontinuous, 0u) << variant_name(m.variant());
  }
}

TEST(NeverOrderBound, Examples) {
  InventoryModel m = lost_sales_zero_demand();
  Grid1D<double> g(0, 4, 1);
  EXPECT_EQ(never_order_bound(m, 0, 2, g), 0.0);
  EXPECT_EQ(never_order_bound(m, 1, 3, g), 3.0);
  EXPECT_EQ(never_order_bound(m, 2, 3, g), 6.0);
}

TEST(BackwardInduction, OrderingOnlyAddsCost) {
  InventoryModel m = lost_sales_zero_demand();
  Grid1D<double> g(0, 4, 1);
  ValueTable t = backward_induction(m, 1, g, 1, 1);
  ASSERT_EQ(t.horizon(), 1);
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    EXPECT_EQ(t.values[0][i], 0.0);
    EXPECT_EQ(t.values[1][i], t.xs[i]);
    EXPECT_EQ(t.policy[1][i], 0.0);
  }
  EXPECT_EQ(continuity_modulus(t, 0), 0.0);
  EXPECT_EQ(continuity_modulus(t, 1), 1.0);
  Grid1D<double> half(0, 4, 0.5);
  EXPECT_EQ(continuity_modulus(backward_induction(m, 1, half, 0.5, 1), 1), 0.5);
}

TEST(BackwardInduction, TinyInstanceMatchesEnumeration) {
  InventoryModel m = tiny_model();
  Grid1D<double> g(0, 2, 1);
  ValueTable t = backward_induction(m, 2, g, 1, 1);
  auto oracle = brute_force(m, 2, g.points(), 2);
  auto lib = enumerate_policies(m, 2, g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(t.values[2][i], oracle[i], 1e-9);
    EXPECT_NEAR(lib[i], oracle[i], 1e-9);
  }
}

TEST(BackwardInduction, RandomTinyInstancesMatchEnumeration) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> cost(0.1, 3.0), disc(0.3, 1.0), prob(0.1, 0.9);
  std::uniform_int_distribution<int> cap(1, 3), dem(0, 2), hor(1, 3);
  for (int trial = 0; trial < 15; ++trial) {
    InventoryModel m;
    m.M = cap(rng);
    m.L = std::max(1, cap(rng));
    m.c1 = cost(rng);
    m.c2 = cost(rng);
    m.alpha = disc(rng);
    double p = prob(rng);
    int d1 = dem(rng), d2 = dem(rng);
    m.demand = d1 == d2 ? std::vector<DemandAtom>{{static_cast<double>(d1), 1.0}}
                        : std::vector<DemandAtom>{{static_cast<double>(d1), p}, {static_cast<double>(d2), 1 - p}};
    int h = hor(rng);
    Grid1D<double> g(0, m.M, 1);
    ValueTable t = backward_induction(m, h, g, 1, 1);
    auto oracle = brute_force(m, h, g.points(), m.M);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(t.values[static_cast<std::size_t>(h)][i], oracle[i], 1e-9) << trial;
  }
}

TEST(BackwardInduction, TableInvariants) {
  InventoryModel m;
  m.c1 = 4;
  m.c2 = 1;
  m.alpha = 0.9;
  m.demand = {{0, 0.5}, {1, 0.5}};
  Grid1D<double> g(0, 8, 0.25);
  ValueTable t = backward_induction(m, 4, g, 0.25, 1);
  auto d = diagnose(m, t, g, 0.25);
  EXPECT_TRUE(d.starts_at_zero);
  EXPECT_TRUE(d.monotone);
  EXPECT_TRUE(d.bound_ok) << d.max_bound_excess;
  for (int s = 1; s <= t.horizon(); ++s)
    for (std::size_t i = t.valid_from[static_cast<std::size_t>(s)]; i < t.xs.size(); ++i) {
      double y = t.policy[static_cast<std::size_t>(s)][i];
      EXPECT_GE(y, 0.0);
      EXPECT_LE(t.xs[i] + y, 8.0 + 1e-9);
    }
  ValueTable again = backward_induction(m, 4, g, 0.25, 4);
  EXPECT_EQ(t.values, again.values);
  EXPECT_EQ(t.policy, again.policy);
}

TEST(BackwardInduction, TableValueInterpolates) {
  InventoryModel m = lost_sales_zero_demand();
  ValueTable t = backward_induction(m, 1, Grid1D<double>(0, 4, 1), 1, 1);
  EXPECT_NEAR(table_value(t, 1, 2.5), 2.5, 1e-12);
  EXPECT_THROW(table_value(t, 1, 5), InterpolationRangeError);
  EXPECT_THROW(table_value(t, 3, 1), InterpolationRangeError);
}

TEST(Validation, BadModelsRejected) {
  InventoryModel m;
  m.c1 = 0;
  EXPECT_THROW(validate_model(m), ValidationError);
  m = InventoryModel{};
  m.demand = {{0, 0.5}, {1, 0.4}};
  EXPECT_THROW(validate_model(m), ValidationError);
  m = InventoryModel{};
  m.alpha = 1.5;
  EXPECT_THROW(validate_model(m), ValidationError);
  m = InventoryModel{};
  m.h = ex::abs(ex::x()) + ex::c(1);
  EXPECT_THROW(validate_model(m), ValidationError);
  m = InventoryModel{};
  m.h = ex::min(ex::abs(ex::x()), ex::c(1));
  EXPECT_THROW(validate_holding_cost(m, Grid1D<double>(0, 3, 1)), ValidationError);
  m = InventoryModel{};
  m.L = 0.5;
  EXPECT_THROW(validate_model(m), ValidationError);
}

TEST(Validation, GridMustCoverStates) {
  InventoryModel m = lost_sales_zero_demand();
  EXPECT_THROW(backward_induction(m, 1, Grid1D<double>(1, 4, 1), 1, 1), GridCoverageError);
  EXPECT_THROW(backward_induction(m, 1, Grid1D<double>(0, 4, 1), 0, 1), ValidationError);
  InventoryModel c = tiny_model();
  EXPECT_THROW(backward_induction(c, 1, Grid1D<double>(0, 1, 1), 1, 1), GridCoverageError);
}

TEST(Config, LineAnchoredErrors) {
  const std::string bad = "{\n  \"L\": 2,\n  \"c1\": -1,\n  \"grid\": {\"lo\": 0, \"hi\": 2, \"step\": 1}\n}\n";
  try {
    load_inventory_text(bad, "inv.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("inv.json:"), std::string::npos) << e.what();
  }
}
