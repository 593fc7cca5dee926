#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "bergelab/core/error.hpp"
#include "bergelab/core/scalar.hpp"

namespace bergelab {

/** @brief Extended real: a finite payload of type T, +inf or -inf. */
template <class T>
class ExtReal {
 public:
  enum class Kind : std::int8_t { NegInf = -1, Finite = 0, PosInf = 1 };

  ExtReal() : kind_(Kind::Finite), v_(0) {}
  ExtReal(T v) : kind_(Kind::Finite), v_(std::move(v)) {  // NOLINT(google-explicit-constructor)
    if constexpr (std::is_same_v<T, double>) {
      if (std::isnan(v_)) throw IndeterminateForm("core", "ext_real", "NaN is not an extended real");
      if (std::isinf(v_)) {
        kind_ = v_ > 0 ? Kind::PosInf : Kind::NegInf;
        v_ = 0;
      }
    }
  }

  static ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
  static ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  bool is_pos_inf() const noexcept { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const noexcept { return kind_ == Kind::NegInf; }
  const T& value() const {
    if (!is_finite()) throw IndeterminateForm("core", "ext_real", "value() of an infinite extended real");
    return v_;
  }

  double to_double() const {
    if (kind_ == Kind::PosInf) return HUGE_VAL;
    if (kind_ == Kind::NegInf) return -HUGE_VAL;
    return ScalarTraits<T>::to_double(v_);
  }

  std::string str() const {
    if (kind_ == Kind::PosInf) return "inf";
    if (kind_ == Kind::NegInf) return "-inf";
    return ScalarTraits<T>::str(v_);
  }

  friend bool operator==(const ExtReal& l, const ExtReal& r) {
    if (l.kind_ != r.kind_) return false;
    return !l.is_finite() || l.v_ == r.v_;
  }
  friend std::strong_ordering operator<=>(const ExtReal& l, const ExtReal& r) {
    if (l.kind_ != r.kind_) return static_cast<int>(l.kind_) <=> static_cast<int>(r.kind_);
    if (!l.is_finite()) return std::strong_ordering::equal;
    if (l.v_ < r.v_) return std::strong_ordering::less;
    if (r.v_ < l.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  explicit ExtReal(Kind k) : kind_(k), v_(0) {}
  Kind kind_;
  T v_;
};

template <class T>
ExtReal<T> ext_neg(const ExtReal<T>& a) {
  if (a.is_pos_inf()) return ExtReal<T>::neg_inf();
  if (a.is_neg_inf()) return ExtReal<T>::pos_inf();
  return ExtReal<T>(-a.value());
}

template <class T>
ExtReal<T> ext_add(const ExtReal<T>& a, const ExtReal<T>& b) {
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
    throw IndeterminateForm("core", "ext_add", "(+inf) + (-inf)");
  if (!a.is_finite()) return a;
  if (!b.is_finite()) return b;
  return ExtReal<T>(a.value() + b.value());
}

template <class T>
ExtReal<T> ext_sub(const ExtReal<T>& a, const ExtReal<T>& b) {
  return ext_add(a, ext_neg(b));
}

template <class T>
int ext_sign(const ExtReal<T>& a) {
  if (a.is_pos_inf()) return 1;
  if (a.is_neg_inf()) return -1;
  const T zero(0);
  return a.value() < zero ? -1 : (zero < a.value() ? 1 : 0);
}

template <class T>
ExtReal<T> ext_mul(const ExtReal<T>& a, const ExtReal<T>& b) {
  if (a.is_finite() && b.is_finite()) return ExtReal<T>(a.value() * b.value());
  int s = ext_sign(a) * ext_sign(b);
  if (s == 0) throw IndeterminateForm("core", "ext_mul", "0 * inf");
  return s > 0 ? ExtReal<T>::pos_inf() : ExtReal<T>::neg_inf();
}

template <class T>
ExtReal<T> ext_div(const ExtReal<T>& a, const ExtReal<T>& b) {
  if (!a.is_finite() && !b.is_finite()) throw IndeterminateForm("core", "ext_div", "inf / inf");
  if (!b.is_finite()) return ExtReal<T>(T(0));
  int sb = ext_sign(b);
  if (sb == 0) throw DivisionByZero("core", "ext_div", "division by zero");
  if (!a.is_finite()) return (ext_sign(a) * sb > 0) ? ExtReal<T>::pos_inf() : ExtReal<T>::neg_inf();
  return ExtReal<T>(a.value() / b.value());
}

template <class T>
ExtReal<T> ext_abs(const ExtReal<T>& a) {
  if (!a.is_finite()) return ExtReal<T>::pos_inf();
  return ExtReal<T>(ScalarTraits<T>::abs(a.value()));
}

template <class T>
const ExtReal<T>& ext_min(const ExtReal<T>& a, const ExtReal<T>& b) {
  return b < a ? b : a;
}

template <class T>
const ExtReal<T>& ext_max(const ExtReal<T>& a, const ExtReal<T>& b) {
  return a < b ? b : a;
}

}  // namespace bergelab
