#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "bergelab/core/error.hpp"
#include "bergelab/core/exact_scalar.hpp"

namespace bergelab {

enum class Mode { Float, Exact };

inline const char* mode_name(Mode m) { return m == Mode::Float ? "float" : "exact"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "float") return Mode::Float;
  if (s == "exact") return Mode::Exact;
  throw ValidationError("core", "parse_mode", "unknown mode '" + s + "' (expected float|exact)");
}

/** @brief Per-mode numeric hooks used by the templated algorithms. */
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr Mode mode = Mode::Float;
  static constexpr bool has_irrationals = false;
  static double from_rational(const Rational& r) { return r.convert_to<double>(); }
  static double from_exact(const ExactScalar& e) { return e.to_double(); }
  static double from_int(long long v) { return static_cast<double>(v); }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
  static bool is_rational(double) {
    throw ExactModeUnsupported("core", "eval_expr", "rationality test requires exact mode");
  }
  static double pow2(int k) { return std::ldexp(1.0, k); }
  static double irrational_scale(double v) { return v; }
  static std::string str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  /** @brief Float comparisons in replay allow this slack. */
  static double replay_slack() { return 1e-12; }
};

template <>
struct ScalarTraits<ExactScalar> {
  static constexpr Mode mode = Mode::Exact;
  static constexpr bool has_irrationals = true;
  static ExactScalar from_rational(const Rational& r) { return ExactScalar(r); }
  static ExactScalar from_exact(const ExactScalar& e) { return e; }
  static ExactScalar from_int(long long v) { return ExactScalar(v); }
  static double to_double(const ExactScalar& v) { return v.to_double(); }
  static ExactScalar abs(const ExactScalar& v) { return bergelab::abs(v); }
  static bool is_rational(const ExactScalar& v) { return v.is_rational(); }
  static ExactScalar pow2(int k) {
    BigInt p = boost::multiprecision::pow(BigInt(2), static_cast<unsigned>(k < 0 ? -k : k));
    return k < 0 ? ExactScalar(Rational(BigInt(1), p)) : ExactScalar(Rational(p));
  }
  /** @brief v * sqrt2 / 3: an offset of opposite rationality class with non-dyadic coefficient. */
  static ExactScalar irrational_scale(const ExactScalar& v) {
    return v * ExactScalar(Rational(0), Rational(1, 3));
  }
  static std::string str(const ExactScalar& v) { return v.str(); }
  static ExactScalar replay_slack() { return ExactScalar(0); }
};

template <class T>
T scalar_from_double_exactly(double v);

template <>
inline double scalar_from_double_exactly<double>(double v) {
  return v;
}

template <>
inline ExactScalar scalar_from_double_exactly<ExactScalar>(double v) {
  return ExactScalar(Rational(v));
}

/** @brief Rational point within tol of v (convergents of sqrt2 approximate the irrational part). */
inline ExactScalar rational_near(const ExactScalar& v, const ExactScalar& tol) {
  if (v.is_rational()) return v;
  BigInt p = 1, q = 1;
  Rational rb = abs(ExactScalar(v.b())).a();
  const Rational& t = tol.a();
  for (int i = 0; i < 200; ++i) {
    if (rb / Rational(q * q) < t) break;
    BigInt np = p + 2 * q;
    BigInt nq = p + q;
    p = np;
    q = nq;
  }
  return ExactScalar(v.a() + v.b() * Rational(p, q));
}

inline double rational_near(double v, double) { return v; }

}  // namespace bergelab
