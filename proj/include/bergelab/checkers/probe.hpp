#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "bergelab/checkers/verdict.hpp"

namespace bergelab {

template <class T>
struct Probe {
  int depth;
  /** 0: x-d, 1: x+d, 2: x-d*sqrt2/3, 3: x+d*sqrt2/3, 4/5: rational points within d/8 of x -+ 7d/8. */
  int slot;
  T x;
  Slice<T> slice;
};

/** @brief Base slice at x plus sampled slices at shrinking distances, grouped by depth. */
template <class T>
struct ProbeSet {
  T x;
  Slice<T> base;
  std::vector<T> radii;
  std::vector<std::vector<Probe<T>>> by_depth;
  std::string schedule;

  Resolution<T> resolution(const Grid1D<T>& y_grid) const {
    return Resolution<T>{radii.back(), y_grid.step(), static_cast<int>(radii.size()) - 1, schedule};
  }
};

template <class T>
std::vector<T> schedule_radii(const CheckParams<T>& params) {
  std::vector<T> r;
  if (params.harmonic_n > 0) {
    for (int n = 1; n <= params.harmonic_n; ++n) r.push_back(T(1) / T(n));
  } else {
    for (int k = 0; k <= params.depth; ++k) r.push_back(params.delta0 * ScalarTraits<T>::pow2(-k));
  }
  return r;
}

template <class T>
std::string schedule_name(const CheckParams<T>& params) {
  if (params.harmonic_n > 0) return "harmonic 1/n, n=1.." + std::to_string(params.harmonic_n);
  return "geometric delta0*2^-k, k=0.." + std::to_string(params.depth);
}

template <class T>
std::vector<std::pair<int, T>> probe_points(const T& x, const T& d) {
  std::vector<std::pair<int, T>> out{{0, x - d}, {1, x + d}};
  if constexpr (ScalarTraits<T>::has_irrationals) {
    T e = ScalarTraits<T>::irrational_scale(d);
    out.push_back({2, x - e});
    out.push_back({3, x + e});
    if (!ScalarTraits<T>::is_rational(x)) {
      T tol = d / T(8);
      T inner = d * ScalarTraits<T>::from_rational(Rational(7, 8));
      out.push_back({4, rational_near(x - inner, tol)});
      out.push_back({5, rational_near(x + inner, tol)});
    }
  }
  return out;
}

/** @brief Samples the base point and every probe; probes outside the domain or with empty slices are dropped. */
template <class T>
ProbeSet<T> build_probes(const Problem<T>& p, const T& x, const CheckParams<T>& params, const char* op) {
  require_in_x_domain(p, x, op);
  ProbeSet<T> ps;
  ps.x = x;
  ps.base = slice_of(p.fiber(x), params.y_grid, p.finite_filter);
  if (ps.base.empty())
    throw PreconditionFailed("checkers", op, "no sampled feasible action at x = " + ScalarTraits<T>::str(x));
  ps.radii = schedule_radii(params);
  ps.schedule = schedule_name(params);
  std::vector<Probe<T>> all;
  for (std::size_t k = 0; k < ps.radii.size(); ++k) {
    std::vector<T> seen;
    for (auto& [slot, px] : probe_points(x, ps.radii[k])) {
      if (px == x || !p.x_domain.contains(px)) continue;
      if (std::find(seen.begin(), seen.end(), px) != seen.end()) continue;
      seen.push_back(px);
      all.push_back(Probe<T>{static_cast<int>(k), slot, px, {}});
    }
  }
  parallel_for(
      all.size(), [&](std::size_t i) { all[i].slice = slice_of(p.fiber(all[i].x), params.y_grid, p.finite_filter); },
      params.workers);
  ps.by_depth.resize(ps.radii.size());
  bool any = false;
  for (auto& pr : all) {
    if (pr.slice.empty()) continue;
    any = true;
    ps.by_depth[static_cast<std::size_t>(pr.depth)].push_back(std::move(pr));
  }
  if (!any)
    throw EmptyDomainNeighborhood("checkers", op,
                                  "no sampled point of Dom(Phi) within " + ScalarTraits<T>::str(ps.radii.front()) +
                                      " of x = " + ScalarTraits<T>::str(x));
  return ps;
}

namespace detail {

template <class T>
T half() {
  return ScalarTraits<T>::from_rational(Rational(1, 2));
}

/** @brief How far m falls below base; -inf when m carries no information. */
template <class T>
ExtReal<T> drop_of(const ExtReal<T>& base, const ExtReal<T>& m) {
  if (m.is_pos_inf() || base.is_neg_inf()) return ExtReal<T>::neg_inf();
  if (base.is_pos_inf() || m.is_neg_inf()) return ExtReal<T>::pos_inf();
  return ExtReal<T>(base.value() - m.value());
}

template <class T>
ExtReal<T> scaled(const ExtReal<T>& v, const T& c) {
  if (!v.is_finite()) return v;
  return ExtReal<T>(v.value() * c);
}

}  // namespace detail

template <class T>
struct JumpResult {
  bool violated = false;
  /** Indices into the input, ordered from the largest radius to the smallest. */
  std::vector<std::size_t> seq;
  T gap{};
};

/**
 * @brief Detects a persistent jump in a sequence of drops taken at decreasing radii.
 *
 * Tail = entries within 16 * r_min. A jump needs every tail drop >= min_gap and the deepest drop
 * at least half the largest tail drop. The sequence then extends to earlier entries whose drop
 * stays above half the smallest tail drop. gap = smallest sequence drop / 2 (1 if all are infinite).
 */
template <class T>
JumpResult<T> detect_jump(const std::vector<T>& radii, const std::vector<ExtReal<T>>& drops, const T& min_gap) {
  JumpResult<T> out;
  const std::size_t n = radii.size();
  if (n == 0) return out;
  T r_min = radii[0];
  std::size_t deepest = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (radii[i] < r_min) {
      r_min = radii[i];
      deepest = i;
    }
  }
  T bound = r_min * T(16);
  std::vector<std::size_t> tail;
  for (std::size_t i = 0; i < n; ++i)
    if (radii[i] <= bound) tail.push_back(i);
  ExtReal<T> tail_min = ExtReal<T>::pos_inf(), tail_max = ExtReal<T>::neg_inf();
  for (auto i : tail) {
    if (drops[i] < ExtReal<T>(min_gap)) return out;
    tail_min = ext_min(tail_min, drops[i]);
    tail_max = ext_max(tail_max, drops[i]);
  }
  const T h = detail::half<T>();
  if (drops[deepest] < detail::scaled(tail_max, h)) return out;
  ExtReal<T> keep = detail::scaled(tail_min, h);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[b] < radii[a]; });
  std::size_t first_tail = n;
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (radii[order[pos]] <= bound) {
      first_tail = pos;
      break;
    }
  }
  std::size_t start = first_tail;
  while (start > 0 && keep <= drops[order[start - 1]]) --start;
  ExtReal<T> seq_min = ExtReal<T>::pos_inf();
  for (std::size_t pos = start; pos < n; ++pos) {
    out.seq.push_back(order[pos]);
    seq_min = ext_min(seq_min, drops[order[pos]]);
  }
  out.violated = true;
  out.gap = seq_min.is_finite() ? seq_min.value() * h : T(1);
  return out;
}

}  // namespace bergelab
