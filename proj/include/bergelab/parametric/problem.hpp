#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "bergelab/core/error.hpp"
#include "bergelab/core/expr.hpp"
#include "bergelab/core/grid.hpp"
#include "bergelab/core/multifunction.hpp"

namespace bergelab {

/** @brief Everything needed to sample and score actions at one parameter value. */
template <class T>
struct Fiber {
  Interval<T> hull;
  std::vector<T> anchors;
  std::function<bool(const T&)> admits;
  std::function<ExtReal<T>(const T&)> u;

  bool feasible(const T& y) const { return hull.contains(y) && (!admits || admits(y)); }
};

/** @brief Parametric minimization problem (X, Y, Phi, u) in arithmetic T. */
template <class T>
struct Problem {
  std::string name;
  Interval<T> x_domain;
  Interval<T> y_domain;
  bool y_truncated_above = false;
  bool y_truncated_below = false;
  /** Y is finite and fully covered by the sample, so minima are attained. */
  bool exhaustive = false;
  /** Drop sampled actions whose objective value is +inf. */
  bool finite_filter = false;
  std::function<Fiber<T>(const T&)> fiber;

  bool contains(const T& x, const T& y) const { return fiber(x).feasible(y); }
  ExtReal<T> u(const T& x, const T& y) const { return fiber(x).u(y); }
};

/** @brief Mode-independent problem definition as read from a problem file. */
struct ProblemSpec {
  std::string name;
  Mode mode = Mode::Float;
  ExactScalar x_lo, x_hi, y_lo, y_hi;
  bool y_truncated_above = false;
  bool y_truncated_below = false;
  bool discrete = false;
  Expr objective;
  MultifunctionSpec phi;
  /** Extra action sample points as expressions in x (e.g. irrational tails approaching an infimum). */
  std::vector<Expr> augment;
  /** Default sampling steps used when the caller gives none. */
  ExactScalar x_step{Rational(1, 100)};
  ExactScalar y_step{Rational(1, 100)};
};

inline void validate_problem_spec(const ProblemSpec& s) {
  if (s.x_hi < s.x_lo) throw ValidationError("parametric", "validate", "space_x has lo > hi");
  if (s.y_hi < s.y_lo) throw ValidationError("parametric", "validate", "space_y has lo > hi");
  if (s.mode == Mode::Exact) {
    for (const auto* v : {&s.x_lo, &s.x_hi, &s.y_lo, &s.y_hi})
      if (!v->is_rational()) throw ValidationError("parametric", "validate", "space bounds must be rational");
  }
  validate_expr(s.objective, s.mode, {Var::x, Var::y});
  validate_multifunction(s.phi, s.mode, {Var::x});
  for (const auto& e : s.augment) validate_expr(e, s.mode, {Var::x});
}

/** @brief Instantiates a spec in arithmetic T (mode must match T). */
template <class T>
Problem<T> compile_problem(const ProblemSpec& s) {
  if (s.mode != ScalarTraits<T>::mode)
    throw ValidationError("parametric", "compile", std::string("problem '") + s.name + "' is " + mode_name(s.mode) +
                                                       " mode but was instantiated as " + mode_name(ScalarTraits<T>::mode));
  validate_problem_spec(s);
  Problem<T> p;
  p.name = s.name;
  p.x_domain = Interval<T>::closed(ScalarTraits<T>::from_exact(s.x_lo), ScalarTraits<T>::from_exact(s.x_hi));
  p.y_domain = Interval<T>::closed(ScalarTraits<T>::from_exact(s.y_lo), ScalarTraits<T>::from_exact(s.y_hi));
  p.y_truncated_above = s.y_truncated_above;
  p.y_truncated_below = s.y_truncated_below;
  p.exhaustive = s.discrete;
  p.fiber = [obj = s.objective, phi = s.phi, aug = s.augment](const T& x) {
    Fiber<T> f;
    f.hull = phi_at(phi, x);
    for (const auto& e : aug) {
      ExtReal<T> v = eval(e, Env<T>::of_x(x));
      if (v.is_finite()) f.anchors.push_back(v.value());
    }
    f.u = [obj, x](const T& y) { return eval(obj, Env<T>::of_xy(x, y)); };
    return f;
  };
  return p;
}

/** @brief Sampled actions at one x, their values, and the minimum. */
template <class T>
struct Slice {
  std::vector<T> ys;
  std::vector<ExtReal<T>> vals;
  ExtReal<T> min = ExtReal<T>::pos_inf();

  bool empty() const { return ys.empty(); }
  std::size_t argmin_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
      if (vals[i] < vals[best]) best = i;
    return best;
  }
};

/** @brief Grid points in the hull, closed finite hull endpoints, and anchors; filtered by admits. */
template <class T>
std::vector<T> sample_actions(const Fiber<T>& f, const Grid1D<T>& y_grid) {
  std::vector<T> ys;
  if (f.hull.is_empty()) return ys;
  auto [first, last] = points_in(y_grid.points(), f.hull);
  ys.reserve(last - first + 2 + f.anchors.size());
  for (std::size_t i = first; i < last; ++i) ys.push_back(y_grid[i]);
  bool extra = false;
  if (f.hull.lo.is_finite() && f.hull.closed_lo) {
    ys.push_back(f.hull.lo.value());
    extra = true;
  }
  if (f.hull.hi.is_finite() && f.hull.closed_hi) {
    ys.push_back(f.hull.hi.value());
    extra = true;
  }
  for (const auto& a : f.anchors) {
    if (f.hull.contains(a)) {
      ys.push_back(a);
      extra = true;
    }
  }
  if (extra) {
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  }
  if (f.admits) ys.erase(std::remove_if(ys.begin(), ys.end(), [&](const T& y) { return !f.admits(y); }), ys.end());
  return ys;
}

template <class T>
Slice<T> slice_of(const Fiber<T>& f, const Grid1D<T>& y_grid, bool finite_filter) {
  Slice<T> s;
  std::vector<T> ys = sample_actions(f, y_grid);
  s.ys.reserve(ys.size());
  s.vals.reserve(ys.size());
  for (auto& y : ys) {
    ExtReal<T> v = f.u(y);
    if (finite_filter && !v.is_finite()) continue;
    if (v < s.min) s.min = v;
    s.ys.push_back(std::move(y));
    s.vals.push_back(std::move(v));
  }
  return s;
}

template <class T>
void require_in_x_domain(const Problem<T>& p, const T& x, const char* op) {
  if (!p.x_domain.contains(x))
    throw PreconditionFailed("parametric", op, "x = " + ScalarTraits<T>::str(x) + " is outside space_x of '" + p.name + "'");
}

template <class T>
Slice<T> slice_at(const Problem<T>& p, const T& x, const Grid1D<T>& y_grid) {
  require_in_x_domain(p, x, "value_at");
  return slice_of(p.fiber(x), y_grid, p.finite_filter);
}

/** @brief Minimum of u(x, .) over the sampled feasible actions; +inf when none. */
template <class T>
ExtReal<T> value_at(const Problem<T>& p, const T& x, const Grid1D<T>& y_grid) {
  return slice_at(p, x, y_grid).min;
}

template <class T>
std::vector<T> solutions_of(const Slice<T>& s, const T& eps) {
  std::vector<T> out;
  if (!s.min.is_finite()) {
    if (s.min.is_pos_inf()) return s.ys;
    for (std::size_t i = 0; i < s.ys.size(); ++i)
      if (s.vals[i].is_neg_inf()) out.push_back(s.ys[i]);
    return out;
  }
  ExtReal<T> bound(s.min.value() + eps);
  for (std::size_t i = 0; i < s.ys.size(); ++i)
    if (s.vals[i] <= bound) out.push_back(s.ys[i]);
  return out;
}

/** @brief Sampled y with u(x,y) <= value + eps; the whole sample when the value is +inf. */
template <class T>
std::vector<T> solutions_at(const Problem<T>& p, const T& x, const Grid1D<T>& y_grid, const T& eps) {
  return solutions_of(slice_at(p, x, y_grid), eps);
}

template <class T>
T default_eps_sol() {
  if constexpr (std::is_same_v<T, double>) {
    return 1e-9;
  } else {
    return T(Rational(1, 1000000000));
  }
}

/** @brief Float-mode solution tolerance from a Lipschitz estimate of u in y and the grid step. */
inline double float_eps_sol(double lipschitz_y, double y_step) { return lipschitz_y * y_step; }

}  // namespace bergelab
