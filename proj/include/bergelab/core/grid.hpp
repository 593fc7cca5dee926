#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bergelab/core/error.hpp"
#include "bergelab/core/ext_real.hpp"
#include "bergelab/core/scalar.hpp"

namespace bergelab {

namespace detail {

inline long long grid_count(double lo, double hi, double step) {
  double n = std::floor((hi - lo) / step + 1e-9);
  return static_cast<long long>(n);
}

inline long long grid_count(const ExactScalar& lo, const ExactScalar& hi, const ExactScalar& step) {
  if (!lo.is_rational() || !hi.is_rational() || !step.is_rational())
    throw ValidationError("core", "grid", "exact-mode grid bounds and step must be rational");
  Rational q = (hi.a() - lo.a()) / step.a();
  BigInt n = boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q);
  return n.convert_to<long long>();
}

}  // namespace detail

/** @brief Arithmetic grid lo, lo+step, ... <= hi. */
template <class T>
class Grid1D {
 public:
  Grid1D() : Grid1D(T(0), T(0), T(1)) {}
  Grid1D(T lo, T hi, T step) : lo_(std::move(lo)), hi_(std::move(hi)), step_(std::move(step)) {
    if (!(T(0) < step_)) throw ValidationError("core", "grid", "step must be positive");
    if (hi_ < lo_) throw ValidationError("core", "grid", "lo must not exceed hi");
    long long n = detail::grid_count(lo_, hi_, step_);
    points_.reserve(static_cast<std::size_t>(n + 1));
    for (long long i = 0; i <= n; ++i) {
      T p = lo_ + T(i) * step_;
      if (hi_ < p) p = hi_;
      points_.push_back(std::move(p));
    }
  }

  const T& lo() const noexcept { return lo_; }
  const T& hi() const noexcept { return hi_; }
  const T& step() const noexcept { return step_; }
  const std::vector<T>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const T& operator[](std::size_t i) const { return points_[i]; }

  Grid1D refined() const { return Grid1D(lo_, hi_, step_ / T(2)); }

 private:
  T lo_, hi_, step_;
  std::vector<T> points_;
};

/** @brief Interval with extended-real ends and closedness flags; may be empty. */
template <class T>
struct Interval {
  ExtReal<T> lo;
  ExtReal<T> hi;
  bool closed_lo = true;
  bool closed_hi = true;

  static Interval closed(T a, T b) { return Interval{ExtReal<T>(std::move(a)), ExtReal<T>(std::move(b)), true, true}; }
  static Interval empty() { return Interval{ExtReal<T>(T(1)), ExtReal<T>(T(0)), true, true}; }

  bool is_empty() const {
    if (hi < lo) return true;
    if (lo == hi) return !(closed_lo && closed_hi) || !lo.is_finite();
    return false;
  }

  bool contains(const T& y) const {
    ExtReal<T> v(y);
    if (v < lo || hi < v) return false;
    if (v == lo && !closed_lo) return false;
    if (v == hi && !closed_hi) return false;
    return true;
  }

  /** @brief Distance from y to the closure (zero inside). */
  ExtReal<T> distance(const T& y) const {
    if (is_empty()) return ExtReal<T>::pos_inf();
    ExtReal<T> v(y);
    if (v < lo) return ext_sub(lo, v);
    if (hi < v) return ext_sub(v, hi);
    return ExtReal<T>(T(0));
  }
};

/** @brief Indices [first, last) of sorted points lying in the interval. */
template <class T>
std::pair<std::size_t, std::size_t> points_in(const std::vector<T>& pts, const Interval<T>& iv) {
  if (iv.is_empty()) return {0, 0};
  auto first = pts.begin();
  if (iv.lo.is_finite()) {
    first = iv.closed_lo ? std::lower_bound(pts.begin(), pts.end(), iv.lo.value())
                         : std::upper_bound(pts.begin(), pts.end(), iv.lo.value());
  } else if (iv.lo.is_pos_inf()) {
    first = pts.end();
  }
  auto last = pts.end();
  if (iv.hi.is_finite()) {
    last = iv.closed_hi ? std::upper_bound(pts.begin(), pts.end(), iv.hi.value())
                        : std::lower_bound(pts.begin(), pts.end(), iv.hi.value());
  } else if (iv.hi.is_neg_inf()) {
    last = pts.begin();
  }
  if (last < first) last = first;
  return {static_cast<std::size_t>(first - pts.begin()), static_cast<std::size_t>(last - pts.begin())};
}

}  // namespace bergelab
