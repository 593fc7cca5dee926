#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bergelab/core/expr_json.hpp"
#include "bergelab/core/grid.hpp"
#include "bergelab/parametric/problem_file.hpp"

namespace bergelab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class InventoryVariant { BoundedOrdersBoundedCapacity, BoundedOrdersUnlimitedCapacity, UnlimitedOrdersBoundedCapacity, UnlimitedOrdersUnlimitedCapacity };

inline const char* variant_name(InventoryVariant v) {
  switch (v) {
    case InventoryVariant::BoundedOrdersBoundedCapacity:
      return "bounded-orders-bounded-capacity";
    case InventoryVariant::BoundedOrdersUnlimitedCapacity:
      return "bounded-orders-unlimited-capacity";
    case InventoryVariant::UnlimitedOrdersBoundedCapacity:
      return "unlimited-orders-bounded-capacity";
    case InventoryVariant::UnlimitedOrdersUnlimitedCapacity:
      return "unlimited-orders-unlimited-capacity";
  }
  return "?";
}

struct DemandAtom {
  double d;
  double p;
};

/** @brief Single-item periodic-review model; L and M may be +inf. */
struct InventoryModel {
  bool backorders = false;
  double L = kInf;
  double M = kInf;
  double c1 = 1;
  double c2 = 1;
  double alpha = 1;
  Expr h = ex::abs(ex::x());
  std::vector<DemandAtom> demand{{0, 1}};

  InventoryVariant variant() const {
    if (std::isfinite(L)) {
      return std::isfinite(M) ? InventoryVariant::BoundedOrdersBoundedCapacity : InventoryVariant::BoundedOrdersUnlimitedCapacity;
    }
    return std::isfinite(M) ? InventoryVariant::UnlimitedOrdersBoundedCapacity : InventoryVariant::UnlimitedOrdersUnlimitedCapacity;
  }

  double d_max() const {
    double m = 0;
    for (const auto& a : demand) m = std::max(m, a.d);
    return m;
  }

  double holding(double z) const {
    ExtReal<double> v = eval(h, Env<double>::of_x(z));
    if (!v.is_finite()) throw ValidationError("inventory", "holding_cost", "h is not finite at z = " + ScalarTraits<double>::str(z));
    return v.value();
  }

  /** @brief T(z): positive part under lost sales, identity under backorders. */
  double clamp(double z) const { return backorders ? z : std::max(0.0, z); }
};

struct OrderInterval {
  double lo = 0;
  double hi = 0;
};

/** @brief Checks the scalar parameters, the demand law, and h(0) = 0. */
inline void validate_model(const InventoryModel& m) {
  auto fail = [](const std::string& msg) { throw ValidationError("inventory", "validate_model", msg); };
  if (!(m.L >= 1)) fail("L must be >= 1 or inf");
  if (!(m.M > 0)) fail("M must be positive or inf");
  if (!(m.c1 > 0) || !std::isfinite(m.c1)) fail("c1 must be positive");
  if (!(m.c2 > 0) || !std::isfinite(m.c2)) fail("c2 must be positive");
  if (!(m.alpha > 0 && m.alpha <= 1)) fail("alpha must lie in (0, 1]");
  if (m.demand.empty()) fail("demand needs at least one atom");
  double total = 0;
  for (const auto& a : m.demand) {
    if (!(a.d >= 0) || !std::isfinite(a.d)) fail("demand atoms must be finite and nonnegative");
    if (!(a.p > 0)) fail("demand probabilities must be positive");
    total += a.p;
  }
  if (std::fabs(total - 1) > 1e-12) fail("demand probabilities must sum to 1");
  validate_expr(m.h, Mode::Float, {Var::x});
  if (m.holding(0) != 0) fail("h(0) must be 0");
}

/** @brief h >= 0 on the grid and the midpoint inequality on every adjacent triple. */
inline void validate_holding_cost(const InventoryModel& m, const Grid1D<double>& grid) {
  const auto& xs = grid.points();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = m.holding(xs[i]);
    if (v < 0) throw ValidationError("inventory", "validate_model", "h is negative at z = " + ScalarTraits<double>::str(xs[i]));
    if (i + 2 < xs.size()) {
      double a = m.holding(xs[i]), b = m.holding(xs[i + 1]), c = m.holding(xs[i + 2]);
      if (b > 0.5 * (a + c) + 1e-12 * (1 + std::fabs(a) + std::fabs(c)))
        throw ValidationError("inventory", "validate_model",
                              "h fails the midpoint convexity test at z = " + ScalarTraits<double>::str(xs[i + 1]));
    }
  }
}

inline void require_state(const InventoryModel& m, double x, const char* op) {
  if (!std::isfinite(x)) throw StateOutOfRange("inventory", op, "state must be finite");
  if (!m.backorders && x < 0)
    throw StateOutOfRange("inventory", op, "x = " + ScalarTraits<double>::str(x) + " is negative under lost sales");
  if (std::isfinite(m.M) && x > m.M)
    throw StateOutOfRange("inventory", op,
                          "x = " + ScalarTraits<double>::str(x) + " exceeds capacity M = " + ScalarTraits<double>::str(m.M));
}

/**
 * @brief Phi(x) for the model's variant: [0, L ^ (M-x)], [0, L], [0, M-x] or [0, inf).
 * With unlimited orders and capacity, a never-order bound g caps the set at g / c2.
 */
inline OrderInterval feasible_orders(const InventoryModel& m, double x, std::optional<double> never_order_bound = std::nullopt) {
  require_state(m, x, "feasible_orders");
  OrderInterval iv{0, kInf};
  switch (m.variant()) {
    case InventoryVariant::BoundedOrdersBoundedCapacity:
      iv.hi = std::min(m.L, m.M - x);
      break;
    case InventoryVariant::BoundedOrdersUnlimitedCapacity:
      iv.hi = m.L;
      break;
    case InventoryVariant::UnlimitedOrdersBoundedCapacity:
      iv.hi = m.M - x;
      break;
    case InventoryVariant::UnlimitedOrdersUnlimitedCapacity:
      if (never_order_bound) iv.hi = *never_order_bound / m.c2;
      break;
  }
  return iv;
}

inline double transition(const InventoryModel& m, double x, double y, double d) {
  OrderInterval iv = feasible_orders(m, x);
  if (!(y >= iv.lo && y <= iv.hi))
    throw InfeasibleOrder("inventory", "transition",
                          "order y = " + ScalarTraits<double>::str(y) + " is outside Phi(" + ScalarTraits<double>::str(x) + ")");
  if (!(d >= 0)) throw InfeasibleOrder("inventory", "transition", "demand must be nonnegative");
  return m.clamp(x + y - d);
}

/** @brief Continuous feasible selector through (x, y): y left of x, y - z + x on [x, x+y], 0 beyond. */
inline double sigma_path(double x, double y, double z) {
  if (z < x) return y;
  if (z <= x + y) return y - z + x;
  return 0;
}

struct InventoryConfig {
  InventoryModel model;
  Grid1D<double> grid;
  double action_step = 1;
  int horizon = 1;
};

namespace detail {

inline double ext_number(const Json& j, const std::string& ptr) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
  }
  return scalar_from_json(j, ptr, Mode::Float).to_double();
}

inline double number_field(const Json& j, const std::string& ptr, const char* key) {
  return scalar_from_json(require_key(j, ptr, key), ptr + "/" + key, Mode::Float).to_double();
}

}  // namespace detail

inline InventoryConfig inventory_config_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaFailure("", "inventory config must be an object");
  reject_unknown_keys(j, "", {"backorders", "L", "M", "c1", "c2", "alpha", "h", "demand", "grid", "action_step", "horizon", "name", "note"});
  InventoryConfig c;
  InventoryModel& m = c.model;
  m.backorders = bool_field(j, "", "backorders", false);
  m.L = j.contains("L") ? detail::ext_number(j["L"], "/L") : kInf;
  m.M = j.contains("M") ? detail::ext_number(j["M"], "/M") : kInf;
  m.c1 = detail::number_field(j, "", "c1");
  m.c2 = detail::number_field(j, "", "c2");
  m.alpha = detail::number_field(j, "", "alpha");
  m.h = expr_from_json(require_key(j, "", "h"), "/h");
  const Json& dem = require_key(j, "", "demand");
  if (!dem.is_array() || dem.empty()) throw SchemaFailure("/demand", "'demand' must be a nonempty array of [d, p] pairs");
  m.demand.clear();
  for (std::size_t i = 0; i < dem.size(); ++i) {
    const std::string p = "/demand/" + std::to_string(i);
    if (!dem[i].is_array() || dem[i].size() != 2) throw SchemaFailure(p, "demand atom must be [d, p]");
    m.demand.push_back({scalar_from_json(dem[i][0], p + "/0", Mode::Float).to_double(),
                        scalar_from_json(dem[i][1], p + "/1", Mode::Float).to_double()});
  }
  const Json& g = require_key(j, "", "grid");
  reject_unknown_keys(g, "/grid", {"lo", "hi", "step"});
  double lo = detail::number_field(g, "/grid", "lo"), hi = detail::number_field(g, "/grid", "hi"),
         step = detail::number_field(g, "/grid", "step");
  if (!(step > 0)) throw SchemaFailure("/grid/step", "step must be positive");
  if (hi < lo) throw SchemaFailure("/grid", "lo exceeds hi");
  c.grid = Grid1D<double>(lo, hi, step);
  c.action_step = detail::number_field(j, "", "action_step");
  if (!(c.action_step > 0)) throw SchemaFailure("/action_step", "action_step must be positive");
  const Json& hz = require_key(j, "", "horizon");
  if (!hz.is_number_integer() || hz.get<long long>() < 0) throw SchemaFailure("/horizon", "horizon must be a nonnegative integer");
  c.horizon = hz.get<int>();
  try {
    validate_model(m);
  } catch (const Error& e) {
    throw SchemaFailure("", e.detail());
  }
  return c;
}

inline Json inventory_config_to_json(const InventoryConfig& c) {
  auto num = [](double v) -> Json { return std::isfinite(v) ? Json(v) : Json("inf"); };
  Json dem = Json::array();
  for (const auto& a : c.model.demand) dem.push_back(Json::array({a.d, a.p}));
  return Json{{"backorders", c.model.backorders},
              {"L", num(c.model.L)},
              {"M", num(c.model.M)},
              {"c1", c.model.c1},
              {"c2", c.model.c2},
              {"alpha", c.model.alpha},
              {"h", expr_to_json(c.model.h)},
              {"demand", dem},
              {"grid", Json{{"lo", c.grid.lo()}, {"hi", c.grid.hi()}, {"step", c.grid.step()}}},
              {"action_step", c.action_step},
              {"horizon", c.horizon}};
}

inline InventoryConfig load_inventory_text(const std::string& text, const std::string& origin) {
  Json j = parse_json_text(text, origin, "inventory", "load_config");
  try {
    return inventory_config_from_json(j);
  } catch (const SchemaFailure& f) {
    throw ConfigError("inventory", "load_config", anchor_message(origin, text, f));
  }
}

inline InventoryConfig load_inventory_file(const std::string& path) {
  return load_inventory_text(read_text_file(path, "inventory", "load_config"), path);
}

}  // namespace bergelab
