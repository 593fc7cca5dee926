#pragma once

#include <memory>
#include <optional>

#include "bergelab/core/parallel.hpp"
#include "bergelab/parametric/problem.hpp"

namespace bergelab {

/** @brief Unconstrained form: Phi-bar = Y and u-bar = u on Gr(Phi), +inf elsewhere. */
template <class T>
Problem<T> bar_transform(const Problem<T>& p) {
  Problem<T> q = p;
  q.name = p.name + ":bar";
  q.finite_filter = false;
  q.fiber = [base = p.fiber, y_dom = p.y_domain](const T& x) {
    Fiber<T> f = base(x);
    Fiber<T> out;
    out.hull = y_dom;
    out.anchors = f.anchors;
    if (f.hull.lo.is_finite() && f.hull.closed_lo) out.anchors.push_back(f.hull.lo.value());
    if (f.hull.hi.is_finite() && f.hull.closed_hi) out.anchors.push_back(f.hull.hi.value());
    out.u = [f](const T& y) -> ExtReal<T> {
      if (!f.feasible(y)) return ExtReal<T>::pos_inf();
      return f.u(y);
    };
    return out;
  };
  return q;
}

/** @brief Constrained form: feasible set filtered to actions with finite objective. */
template <class T>
Problem<T> hat_transform(const Problem<T>& p) {
  Problem<T> q = p;
  q.name = p.name + ":hat";
  q.finite_filter = true;
  return q;
}

/** @brief Sublevel-localized problem together with the resolution its emptiness tests used. */
template <class T>
struct ModifiedProblem {
  Problem<T> problem;
  T lambda;
  T x0;
  Grid1D<T> resolution;
  /** True where the sublevel set at z was empty in the sample and the slice at x0 was substituted. */
  std::function<bool(const T&)> uses_fallback;
};

/**
 * @brief Phi_{lambda,x0}(z) = {y in Phi(z): u(z,y) <= lambda} if that sample is nonempty,
 * else {y in Phi(x0): u(x0,y) <= lambda}; u_{lambda,x0} follows the same switch.
 */
template <class T>
ModifiedProblem<T> modified_problem(const Problem<T>& p, const T& lambda, const T& x0, const Grid1D<T>& y_grid) {
  require_in_x_domain(p, x0, "modified_problem");
  Fiber<T> f0 = p.fiber(x0);
  Slice<T> s0 = slice_of(f0, y_grid, p.finite_filter);
  bool ok = false;
  for (const auto& v : s0.vals) ok = ok || v <= ExtReal<T>(lambda);
  if (!ok)
    throw PreconditionFailed("parametric", "modified_problem",
                             "no sampled y in Phi(x0) with u(x0,y) <= lambda at x0 = " + ScalarTraits<T>::str(x0) +
                                 ", lambda = " + ScalarTraits<T>::str(lambda) + " (y step " +
                                 ScalarTraits<T>::str(y_grid.step()) + ")");
  auto nonempty_at = [y_grid, lambda](const Fiber<T>& f) {
    for (const auto& y : sample_actions(f, y_grid))
      if (f.u(y) <= ExtReal<T>(lambda)) return true;
    return false;
  };
  auto restrict = [lambda](Fiber<T> f) {
    Fiber<T> out = f;
    out.admits = [f, lambda](const T& y) {
      if (f.admits && !f.admits(y)) return false;
      return f.u(y) <= ExtReal<T>(lambda);
    };
    return out;
  };
  ModifiedProblem<T> mp{p, lambda, x0, y_grid, {}};
  mp.problem.name = p.name + ":modified";
  mp.problem.exhaustive = p.exhaustive;
  mp.problem.fiber = [base = p.fiber, f0, nonempty_at, restrict](const T& z) {
    Fiber<T> fz = base(z);
    if (nonempty_at(fz)) return restrict(fz);
    return restrict(f0);
  };
  mp.uses_fallback = [base = p.fiber, nonempty_at](const T& z) { return !nonempty_at(base(z)); };
  return mp;
}

/** @brief Value function sampled along a grid, with argmin lists. */
template <class T>
struct ValueProfile {
  std::vector<T> xs;
  std::vector<ExtReal<T>> values;
  std::vector<std::vector<T>> argmins;
};

template <class T>
ValueProfile<T> compute_profile(const Problem<T>& p, const Grid1D<T>& x_grid, const Grid1D<T>& y_grid, const T& eps,
                                unsigned workers = worker_count()) {
  ValueProfile<T> prof;
  prof.xs = x_grid.points();
  prof.values.resize(prof.xs.size());
  prof.argmins.resize(prof.xs.size());
  parallel_for(
      prof.xs.size(),
      [&](std::size_t i) {
        Slice<T> s = slice_at(p, prof.xs[i], y_grid);
        prof.values[i] = s.min;
        prof.argmins[i] = solutions_of(s, eps);
      },
      workers);
  return prof;
}

/** @brief Sampled epigraphical projection: lambdas reached by some sampled feasible action. */
template <class T>
std::vector<T> epi_projection_at(const Problem<T>& p, const T& x, const std::vector<T>& lambdas, const Grid1D<T>& y_grid) {
  ExtReal<T> m = value_at(p, x, y_grid);
  std::vector<T> out;
  for (const auto& l : lambdas)
    if (m <= ExtReal<T>(l)) out.push_back(l);
  return out;
}

template <class T>
struct EpiComparison {
  T x;
  ExtReal<T> reference;
  bool equal = true;
  std::optional<T> witness_lambda;
};

/**
 * @brief Compares the sampled projection with {lambda : u*(x) <= lambda}.
 * The reference u* is a certified closed form when supplied, otherwise the sampled value.
 */
template <class T>
std::vector<EpiComparison<T>> check_epi_equality(const Problem<T>& p, const Grid1D<T>& x_grid, const std::vector<T>& lambdas,
                                                 const Grid1D<T>& y_grid,
                                                 const std::function<ExtReal<T>(const T&)>& reference = {}) {
  std::vector<EpiComparison<T>> out;
  for (const auto& x : x_grid.points()) {
    ExtReal<T> ref = reference ? reference(x) : value_at(p, x, y_grid);
    std::vector<T> proj = epi_projection_at(p, x, lambdas, y_grid);
    EpiComparison<T> c{x, ref, true, std::nullopt};
    for (const auto& l : lambdas) {
      bool in_epi = ref <= ExtReal<T>(l);
      bool in_proj = std::find(proj.begin(), proj.end(), l) != proj.end();
      if (in_epi != in_proj) {
        c.equal = false;
        c.witness_lambda = l;
        break;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace bergelab
