#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

#include "bergelab/checkers/probe.hpp"

namespace bergelab {

/** @brief Extended-real function sampled at sorted points. */
template <class T>
struct GridFunction {
  std::vector<T> xs;
  std::vector<ExtReal<T>> values;

  static GridFunction from(const Grid1D<T>& g, const std::function<ExtReal<T>(const T&)>& f) {
    GridFunction out;
    out.xs = g.points();
    out.values.reserve(out.xs.size());
    for (const auto& x : out.xs) out.values.push_back(f(x));
    return out;
  }
};

namespace detail {

template <class T>
bool within(const T& d, const T& rho) {
  if constexpr (std::is_same_v<T, double>) {
    return d <= rho * (1 + 1e-9);
  } else {
    return d <= rho;
  }
}

template <class T>
GridFunction<T> negated(const GridFunction<T>& f) {
  GridFunction<T> g{f.xs, {}};
  g.values.reserve(f.values.size());
  for (const auto& v : f.values) g.values.push_back(ext_neg(v));
  return g;
}

/** @brief Lower-side jump test at index i using window minima at dyadic multiples of the nearest spacing. */
template <class T>
std::optional<Witness<T>> lsc_fn_witness(const GridFunction<T>& f, std::size_t i, const T& min_gap, int* scales) {
  const std::size_t n = f.xs.size();
  if (scales) *scales = 0;
  if (n < 2) return std::nullopt;
  const T& x = f.xs[i];
  std::vector<std::pair<T, std::size_t>> others;
  others.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    if (j != i) others.push_back({ScalarTraits<T>::abs(f.xs[j] - x), j});
  std::sort(others.begin(), others.end(), [&](const auto& a, const auto& b) {
    if (a.first < b.first) return true;
    if (b.first < a.first) return false;
    return f.xs[a.second] < f.xs[b.second];
  });
  T d_min = others.front().first;
  const T d_max = others.back().first;
  if (!(T(0) < d_min)) return std::nullopt;
  std::vector<T> radii;
  std::vector<ExtReal<T>> mins;
  std::vector<std::size_t> argmins;
  std::size_t pos = 0;
  // minimum over the annulus (rho/2, rho], so the argmins approach x
  for (T rho = d_min;; rho = rho * T(2)) {
    ExtReal<T> cur = ExtReal<T>::pos_inf();
    std::optional<std::size_t> arg;
    while (pos < others.size() && within(others[pos].first, rho)) {
      if (!arg || f.values[others[pos].second] < cur) {
        cur = f.values[others[pos].second];
        arg = others[pos].second;
      }
      ++pos;
    }
    if (arg) {
      radii.push_back(rho);
      mins.push_back(cur);
      argmins.push_back(*arg);
    }
    if (pos == others.size() || d_max <= rho) break;
  }
  if (scales) *scales = static_cast<int>(radii.size());
  std::vector<ExtReal<T>> drops;
  for (const auto& m : mins) drops.push_back(drop_of(f.values[i], m));
  JumpResult<T> jr = detect_jump(radii, drops, min_gap);
  if (!jr.violated) return std::nullopt;
  Witness<T> w;
  w.kind = "lsc_fn";
  w.x = x;
  w.base_value = f.values[i];
  w.gap = jr.gap;
  ExtReal<T> top = ExtReal<T>::neg_inf();
  for (auto k : jr.seq) {
    w.seq.push_back(WitnessPoint<T>{f.xs[argmins[k]], std::nullopt, f.values[argmins[k]], radii[k]});
    top = ext_max(top, f.values[argmins[k]]);
  }
  if (top.is_finite()) {
    w.level = top.value() + w.gap;
  } else if (f.values[i].is_finite()) {
    w.level = f.values[i].value() - w.gap;
  }
  return w;
}

template <class T>
Witness<T> to_usc(Witness<T> w) {
  w.kind = "usc_fn";
  if (w.base_value) w.base_value = ext_neg(*w.base_value);
  if (w.level) w.level = -*w.level;
  for (auto& p : w.seq) p.value = ext_neg(p.value);
  return w;
}

template <class T>
T min_spacing(const std::vector<T>& xs) {
  T d = xs.size() > 1 ? xs[1] - xs[0] : T(0);
  for (std::size_t i = 2; i < xs.size(); ++i)
    if (xs[i] - xs[i - 1] < d) d = xs[i] - xs[i - 1];
  return d;
}

template <class T>
Verdict<T> fn_verdict(const char* property, const GridFunction<T>& f, std::size_t i, std::optional<Witness<T>> w,
                      int scales) {
  Verdict<T> v;
  v.property = property;
  v.point = f.xs.empty() ? T(0) : f.xs[i];
  v.status = w ? Status::Violated : Status::NoViolationFound;
  v.witness = std::move(w);
  v.resolution = Resolution<T>{min_spacing(f.xs), T(0), scales, "dyadic windows"};
  return v;
}

}  // namespace detail

/** @brief lsc test of f at the sample point nearest x. */
template <class T>
Verdict<T> check_lsc_fn_at(const GridFunction<T>& f, std::size_t i, const T& min_gap) {
  int scales = 0;
  auto w = detail::lsc_fn_witness(f, i, min_gap, &scales);
  return detail::fn_verdict("lsc", f, i, std::move(w), scales);
}

template <class T>
Verdict<T> check_usc_fn_at(const GridFunction<T>& f, std::size_t i, const T& min_gap) {
  int scales = 0;
  auto w = detail::lsc_fn_witness(detail::negated(f), i, min_gap, &scales);
  if (w) w = detail::to_usc(std::move(*w));
  return detail::fn_verdict("usc", f, i, std::move(w), scales);
}

/** @brief Scans every grid point; reports the first point (in x order) with a downward jump. */
template <class T>
Verdict<T> check_lsc_fn(const GridFunction<T>& f, const T& min_gap) {
  int scales = 0;
  for (std::size_t i = 0; i < f.xs.size(); ++i) {
    auto w = detail::lsc_fn_witness(f, i, min_gap, &scales);
    if (w) return detail::fn_verdict("lsc", f, i, std::move(w), scales);
  }
  return detail::fn_verdict<T>("lsc", f, 0, std::nullopt, scales);
}

template <class T>
Verdict<T> check_usc_fn(const GridFunction<T>& f, const T& min_gap) {
  Verdict<T> v = check_lsc_fn(detail::negated(f), min_gap);
  v.property = "usc";
  if (v.witness) v.witness = detail::to_usc(std::move(*v.witness));
  return v;
}

/** @brief Re-evaluates an lsc_fn / usc_fn witness through f; true when every inequality holds with margin gap. */
template <class T>
bool replay_fn_witness(const Witness<T>& w, const std::function<ExtReal<T>(const T&)>& f) {
  if (!w.level) return false;
  const T slack = ScalarTraits<T>::replay_slack();
  const bool upper = w.kind == "usc_fn";
  if (!upper && w.kind != "lsc_fn") return false;
  const T& g = *w.level;
  auto holds = [&](const ExtReal<T>& lhs, const ExtReal<T>& rhs) { return lhs <= ext_add(rhs, ExtReal<T>(slack)); };
  ExtReal<T> base = f(w.x);
  // lsc: f(x_k) + gap <= level <= f(x) - gap; usc: mirrored
  if (!upper && !holds(ExtReal<T>(g + w.gap), base)) return false;
  if (upper && !holds(base, ExtReal<T>(g - w.gap))) return false;
  for (const auto& p : w.seq) {
    ExtReal<T> v = f(p.x);
    if (!upper && !holds(ext_add(v, ExtReal<T>(w.gap)), ExtReal<T>(g))) return false;
    if (upper && !holds(ExtReal<T>(g + w.gap), v)) return false;
  }
  return true;
}

}  // namespace bergelab
