#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bergelab/core/parallel.hpp"
#include "bergelab/inventory/model.hpp"

namespace bergelab {

/**
 * @brief Stage-indexed values u*_0..u*_H on a state grid.
 *
 * Under backorders stage t is only defined from valid_from[t] upward: each stage can reach
 * d_max below the states it is computed for.
 */
struct ValueTable {
  std::vector<double> xs;
  double step = 1;
  std::vector<std::vector<double>> values;
  /** Chosen order per stage and state; stage 0 holds zeros. */
  std::vector<std::vector<double>> policy;
  std::vector<std::size_t> valid_from;

  int horizon() const { return static_cast<int>(values.size()) - 1; }
};

namespace detail {

inline bool near_grid(double v, double g) { return std::fabs(v - g) <= 1e-9 * std::max(1.0, std::fabs(g)); }

/** @brief Piecewise-linear value of stage row `vals` at z; exact on grid points. */
inline double interpolate_row(const std::vector<double>& xs, double step, const std::vector<double>& vals, std::size_t first,
                              double z, const char* op, int stage) {
  const double lo = xs[first], hi = xs.back();
  auto out_of_range = [&]() {
    throw GridCoverageError("inventory", op,
                            "state " + ScalarTraits<double>::str(z) + " reached from stage " + std::to_string(stage) +
                                " lies outside the covered grid [" + ScalarTraits<double>::str(lo) + ", " +
                                ScalarTraits<double>::str(hi) + "]");
  };
  if (z < lo && !near_grid(z, lo)) out_of_range();
  if (z > hi && !near_grid(z, hi)) out_of_range();
  double pos = (z - xs[0]) / step;
  double k = std::floor(pos + 1e-9);
  std::size_t i = static_cast<std::size_t>(std::max(0.0, k));
  if (i >= xs.size() - 1) return vals.back();
  if (i < first) i = first;
  if (near_grid(z, xs[i])) return vals[i];
  if (near_grid(z, xs[i + 1])) return vals[i + 1];
  double w = (z - xs[i]) / (xs[i + 1] - xs[i]);
  return vals[i] + w * (vals[i + 1] - vals[i]);
}

inline std::size_t first_valid(const std::vector<double>& xs, double bound) {
  std::size_t i = 0;
  while (i < xs.size() && xs[i] < bound && !near_grid(xs[i], bound)) ++i;
  return i;
}

inline void require_grid_fits(const InventoryModel& m, const Grid1D<double>& grid, const char* op) {
  if (!m.backorders && !near_grid(grid.lo(), 0))
    throw GridCoverageError("inventory", op, "lost-sales state grid must start at 0 (got " + ScalarTraits<double>::str(grid.lo()) + ")");
  if (std::isfinite(m.M) && !near_grid(grid.points().back(), m.M))
    throw GridCoverageError("inventory", op,
                            "state grid must end at capacity M = " + ScalarTraits<double>::str(m.M) + " (last point " +
                                ScalarTraits<double>::str(grid.points().back()) + ")");
}

}  // namespace detail

/**
 * @brief Never-order bounds g_0..g_H on the grid: g_0 = 0, g_{t+1}(x) = E h(T(x-D)) + alpha E g_t(T(x-D)).
 * Row t is defined from index valid_from[t].
 */
inline ValueTable never_order_table(const InventoryModel& m, int horizon, const Grid1D<double>& grid) {
  validate_model(m);
  detail::require_grid_fits(m, grid, "never_order_bound");
  ValueTable g;
  g.xs = grid.points();
  g.step = grid.step();
  const double dmax = m.d_max();
  g.values.assign(1, std::vector<double>(g.xs.size(), 0.0));
  g.policy.assign(1, std::vector<double>(g.xs.size(), 0.0));
  g.valid_from.assign(1, 0);
  for (int t = 1; t <= horizon; ++t) {
    std::size_t from = m.backorders ? detail::first_valid(g.xs, grid.lo() + t * dmax) : 0;
    if (from >= g.xs.size())
      throw GridCoverageError("inventory", "never_order_bound",
                              "backorder grid too short for " + std::to_string(t) + " stages of demand up to " + ScalarTraits<double>::str(dmax));
    std::vector<double> row(g.xs.size(), std::nan(""));
    for (std::size_t i = from; i < g.xs.size(); ++i) {
      double acc = 0;
      for (const auto& a : m.demand) {
        double z = m.clamp(g.xs[i] - a.d);
        acc += a.p * (m.holding(z) + m.alpha * detail::interpolate_row(g.xs, g.step, g.values[t - 1], g.valid_from[t - 1], z,
                                                                        "never_order_bound", t - 1));
      }
      row[i] = acc;
    }
    g.values.push_back(std::move(row));
    g.policy.push_back(std::vector<double>(g.xs.size(), 0.0));
    g.valid_from.push_back(from);
  }
  return g;
}

inline double never_order_bound(const InventoryModel& m, int tau, double x, const Grid1D<double>& grid) {
  ValueTable g = never_order_table(m, tau, grid);
  for (std::size_t i = g.valid_from[static_cast<std::size_t>(tau)]; i < g.xs.size(); ++i)
    if (detail::near_grid(g.xs[i], x)) return g.values[static_cast<std::size_t>(tau)][i];
  throw GridCoverageError("inventory", "never_order_bound", "x = " + ScalarTraits<double>::str(x) + " is not a covered grid state");
}

/** @brief Order cap used by the solver: Phi(x), with unbounded sets cut at g_t(x)/c2 and at grid hi - x. */
inline double solver_order_cap(const InventoryModel& m, double x, double grid_hi, std::optional<double> g_h) {
  OrderInterval iv = feasible_orders(m, x, g_h);
  double cap = iv.hi;
  if (!std::isfinite(m.M)) cap = std::min(cap, grid_hi - x);
  return std::max(0.0, cap);
}

/** @brief 0, s, 2s, ... below cap, plus cap itself. */
inline std::vector<double> order_sample(double cap, double action_step) {
  std::vector<double> ys{0.0};
  for (long long k = 1;; ++k) {
    double y = static_cast<double>(k) * action_step;
    if (y > cap && !detail::near_grid(y, cap)) break;
    ys.push_back(std::min(y, cap));
  }
  if (ys.back() < cap && !detail::near_grid(ys.back(), cap)) ys.push_back(cap);
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  return ys;
}

/** @brief u_{t+1}(x, y) given the continuation row u*_t. */
inline double stage_objective(const InventoryModel& m, const ValueTable& table, int t, double x, double y) {
  double acc = (y > 0 ? m.c1 : 0.0) + m.c2 * y;
  for (const auto& a : m.demand) {
    double z = m.clamp(x + y - a.d);
    acc += a.p * (m.holding(z) + m.alpha * detail::interpolate_row(table.xs, table.step, table.values[static_cast<std::size_t>(t)],
                                                                    table.valid_from[static_cast<std::size_t>(t)], z,
                                                                    "backward_induction", t));
  }
  return acc;
}

/**
 * @brief Backward induction on the optimality equations over a sampled order set.
 * Ties go to the smallest order.
 */
inline ValueTable backward_induction(const InventoryModel& m, int horizon, const Grid1D<double>& grid, double action_step,
                                     unsigned workers = worker_count()) {
  if (!(action_step > 0)) throw ValidationError("inventory", "backward_induction", "action_step must be positive");
  validate_model(m);
  validate_holding_cost(m, grid);
  ValueTable g = never_order_table(m, horizon, grid);
  const bool truncate = m.variant() == InventoryVariant::UnlimitedOrdersUnlimitedCapacity;
  ValueTable u;
  u.xs = g.xs;
  u.step = g.step;
  u.values.assign(1, std::vector<double>(u.xs.size(), 0.0));
  u.policy.assign(1, std::vector<double>(u.xs.size(), 0.0));
  u.valid_from = g.valid_from;
  const double hi = u.xs.back();
  for (int t = 1; t <= horizon; ++t) {
    std::vector<double> row(u.xs.size(), std::nan("")), pol(u.xs.size(), std::nan(""));
    const std::size_t from = u.valid_from[static_cast<std::size_t>(t)];
    parallel_for(
        u.xs.size() - from,
        [&](std::size_t k) {
          const std::size_t i = from + k;
          const double x = u.xs[i];
          std::optional<double> bound;
          if (truncate) bound = g.values[static_cast<std::size_t>(t)][i];
          double best = kInf, arg = 0;
          for (double y : order_sample(solver_order_cap(m, x, hi, bound), action_step)) {
            double v = stage_objective(m, u, t - 1, x, y);
            if (v < best) {
              best = v;
              arg = y;
            }
          }
          row[i] = best;
          pol[i] = arg;
        },
        workers);
    u.values.push_back(std::move(row));
    u.policy.push_back(std::move(pol));
  }
  return u;
}

/** @brief max |u*_t(x_{i+1}) - u*_t(x_i)| over adjacent covered grid points. */
inline double continuity_modulus(const ValueTable& table, int stage) {
  if (stage < 0 || stage > table.horizon())
    throw ValidationError("inventory", "continuity_modulus", "stage " + std::to_string(stage) + " is outside the table");
  const auto& row = table.values[static_cast<std::size_t>(stage)];
  double m = 0;
  for (std::size_t i = table.valid_from[static_cast<std::size_t>(stage)]; i + 1 < row.size(); ++i)
    m = std::max(m, std::fabs(row[i + 1] - row[i]));
  return m;
}

/** @brief Value of a stage row at an arbitrary covered state. */
inline double table_value(const ValueTable& table, int stage, double x) {
  if (stage < 0 || stage > table.horizon())
    throw InterpolationRangeError("inventory", "table_value", "stage " + std::to_string(stage) + " is outside the table");
  const std::size_t s = static_cast<std::size_t>(stage);
  const double lo = table.xs[table.valid_from[s]];
  if ((x < lo && !detail::near_grid(x, lo)) || (x > table.xs.back() && !detail::near_grid(x, table.xs.back())))
    throw InterpolationRangeError("inventory", "table_value", "x = " + ScalarTraits<double>::str(x) + " is outside the covered grid");
  return detail::interpolate_row(table.xs, table.step, table.values[s], table.valid_from[s], x, "table_value", stage);
}

struct SigmaReport {
  std::size_t checked = 0;
  std::size_t infeasible = 0;
  std::size_t discontinuous = 0;
  std::optional<std::array<double, 3>> first_infeasible;
};

/** @brief sigma_y feasibility and sampled 1-Lipschitz continuity for y = every sampled order at every state. */
inline SigmaReport sigma_feasibility(const InventoryModel& m, const Grid1D<double>& grid, double action_step) {
  SigmaReport r;
  const auto& xs = grid.points();
  for (double x : xs) {
    OrderInterval iv = feasible_orders(m, x);
    double cap = std::isfinite(iv.hi) ? iv.hi : grid.hi() - x;
    for (double y : order_sample(std::max(0.0, cap), action_step)) {
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double z = xs[k], s = sigma_path(x, y, z);
        ++r.checked;
        OrderInterval at = feasible_orders(m, z);
        if (s < at.lo || s > at.hi + 1e-12) {
          ++r.infeasible;
          if (!r.first_infeasible) r.first_infeasible = std::array<double, 3>{x, y, z};
        }
        if (k + 1 < xs.size() && std::fabs(sigma_path(x, y, xs[k + 1]) - s) > xs[k + 1] - z + 1e-12) ++r.discontinuous;
      }
    }
  }
  return r;
}

struct InventoryDiagnostics {
  std::vector<double> moduli;
  bool starts_at_zero = true;
  bool monotone = true;
  double max_bound_excess = -kInf;
  bool bound_ok = true;
  SigmaReport sigma;
  std::optional<double> oracle_max_delta;
};

inline InventoryDiagnostics diagnose(const InventoryModel& m, const ValueTable& u, const Grid1D<double>& grid, double action_step) {
  InventoryDiagnostics d;
  ValueTable g = never_order_table(m, u.horizon(), grid);
  for (int t = 0; t <= u.horizon(); ++t) {
    const std::size_t s = static_cast<std::size_t>(t);
    d.moduli.push_back(continuity_modulus(u, t));
    for (std::size_t i = u.valid_from[s]; i < u.xs.size(); ++i) {
      if (t == 0 && u.values[0][i] != 0) d.starts_at_zero = false;
      if (t > 0 && i >= u.valid_from[s - 1] && u.values[s][i] < u.values[s - 1][i]) d.monotone = false;
      d.max_bound_excess = std::max(d.max_bound_excess, u.values[s][i] - g.values[s][i]);
    }
  }
  d.bound_ok = d.max_bound_excess <= 1e-9;
  d.sigma = sigma_feasibility(m, grid, action_step);
  return d;
}

/**
 * @brief Exhaustive search over deterministic Markov policies on a tiny on-grid instance.
 * Returns the best expected cost from each grid state over all policies.
 */
inline std::vector<double> enumerate_policies(const InventoryModel& m, int horizon, const Grid1D<double>& grid, double action_step,
                                              std::size_t max_policies = 1000000) {
  validate_model(m);
  const auto& xs = grid.points();
  const double hi = xs.back();
  std::vector<std::vector<double>> choices(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) choices[i] = order_sample(solver_order_cap(m, xs[i], hi, std::nullopt), action_step);
  double per_stage = 1;
  for (const auto& c : choices) per_stage *= static_cast<double>(c.size());
  const double total = std::pow(per_stage, horizon);
  if (total > static_cast<double>(max_policies))
    throw ValidationError("inventory", "enumerate_policies", "instance too large for exhaustive enumeration");
  auto index_of = [&](double z) -> std::size_t {
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (detail::near_grid(xs[i], z)) return i;
    throw GridCoverageError("inventory", "enumerate_policies", "state " + ScalarTraits<double>::str(z) + " is off the grid");
  };
  // policy[s][i] = index into choices[i] used when s stages remain after this decision
  std::vector<std::vector<std::size_t>> policy(static_cast<std::size_t>(horizon), std::vector<std::size_t>(xs.size(), 0));
  std::vector<double> best(xs.size(), kInf);
  std::function<double(std::size_t, int)> cost = [&](std::size_t i, int left) -> double {
    if (left == 0) return 0.0;
    double y = choices[i][policy[static_cast<std::size_t>(left - 1)][i]];
    double acc = (y > 0 ? m.c1 : 0.0) + m.c2 * y;
    for (const auto& a : m.demand) {
      double z = m.clamp(xs[i] + y - a.d);
      acc += a.p * (m.holding(z) + m.alpha * cost(index_of(z), left - 1));
    }
    return acc;
  };
  const std::size_t count = static_cast<std::size_t>(total);
  for (std::size_t p = 0; p < count; ++p) {
    std::size_t rest = p;
    for (auto& stage : policy) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        stage[i] = rest % choices[i].size();
        rest /= choices[i].size();
      }
    }
    for (std::size_t i = 0; i < xs.size(); ++i) best[i] = std::min(best[i], cost(i, horizon));
  }
  return best;
}

}  // namespace bergelab
