#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <compare>
#include <string>
#include <string_view>

#include "bergelab/core/error.hpp"

namespace bergelab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string rational_to_string(const Rational& r) {
  const BigInt& n = boost::multiprecision::numerator(r);
  const BigInt& d = boost::multiprecision::denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

/** @brief Parses "p", "p/q" or a plain decimal such as "-0.25" into an exact rational. */
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    return ValidationError("core", "parse_rational", "not a rational literal: '" + std::string(text) + "'");
  };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw fail();
  auto parse_int = [&](const std::string& t) -> BigInt {
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i >= t.size()) throw fail();
    for (std::size_t j = i; j < t.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(t[j]))) throw fail();
    BigInt v(t.substr(i));
    return t[0] == '-' ? BigInt(-v) : v;
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    BigInt n = parse_int(s.substr(0, slash));
    BigInt d = parse_int(s.substr(slash + 1));
    if (d == 0) throw fail();
    return Rational(n, d);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot);
    std::string fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
    if (ip.empty()) ip = "0";
    if (fp.empty()) throw fail();
    BigInt whole = parse_int(ip);
    BigInt frac = parse_int(fp);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(fp.size()));
    Rational r = Rational(whole) + Rational(frac, scale);
    return neg ? Rational(-r) : r;
  }
  return Rational(parse_int(s));
}

/** @brief Exact number a + b*sqrt(2) with rational a, b. */
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(int v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(long long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(Rational a) : a_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

  static ExactScalar sqrt2() { return ExactScalar(Rational(0), Rational(1)); }

  const Rational& a() const noexcept { return a_; }
  const Rational& b() const noexcept { return b_; }
  bool is_rational() const { return b_ == 0; }

  /** @brief Sign of a + b*sqrt2, decided exactly. */
  int sign() const {
    int sa = a_.sign();
    int sb = b_.sign();
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    Rational a2 = a_ * a_;
    Rational b2 = 2 * b_ * b_;
    if (sa > 0) return a2 > b2 ? 1 : -1;
    return b2 > a2 ? 1 : -1;
  }

  double to_double() const {
    return a_.convert_to<double>() + b_.convert_to<double>() * 1.41421356237309504880;
  }

  std::string str() const {
    if (b_ == 0) return rational_to_string(a_);
    std::string rb = rational_to_string(b_) + "*sqrt2";
    if (a_ == 0) return rb;
    return rational_to_string(a_) + (b_ > 0 ? "+" : "") + rb;
  }

  ExactScalar operator-() const { return ExactScalar(-a_, -b_); }
  friend ExactScalar operator+(const ExactScalar& l, const ExactScalar& r) {
    return ExactScalar(l.a_ + r.a_, l.b_ + r.b_);
  }
  friend ExactScalar operator-(const ExactScalar& l, const ExactScalar& r) {
    return ExactScalar(l.a_ - r.a_, l.b_ - r.b_);
  }
  friend ExactScalar operator*(const ExactScalar& l, const ExactScalar& r) {
    return ExactScalar(l.a_ * r.a_ + 2 * l.b_ * r.b_, l.a_ * r.b_ + l.b_ * r.a_);
  }
  friend ExactScalar operator/(const ExactScalar& l, const ExactScalar& r) {
    Rational n = r.a_ * r.a_ - 2 * r.b_ * r.b_;
    if (n == 0) throw DivisionByZero("core", "exact_div", "division by zero");
    ExactScalar conj(r.a_ / n, -r.b_ / n);
    return l * conj;
  }
  ExactScalar& operator+=(const ExactScalar& r) { return *this = *this + r; }
  ExactScalar& operator-=(const ExactScalar& r) { return *this = *this - r; }
  ExactScalar& operator*=(const ExactScalar& r) { return *this = *this * r; }
  ExactScalar& operator/=(const ExactScalar& r) { return *this = *this / r; }

  friend bool operator==(const ExactScalar& l, const ExactScalar& r) { return l.a_ == r.a_ && l.b_ == r.b_; }
  friend std::strong_ordering operator<=>(const ExactScalar& l, const ExactScalar& r) {
    int s = (l - r).sign();
    return s < 0 ? std::strong_ordering::less : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  Rational a_{0};
  Rational b_{0};
};

inline ExactScalar abs(const ExactScalar& v) { return v.sign() < 0 ? -v : v; }

/** @brief Parses "q", "q+r*sqrt2", "r*sqrt2" or "sqrt2" forms. */
inline ExactScalar parse_exact(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  auto pos = s.find("sqrt2");
  if (pos == std::string::npos) return ExactScalar(parse_rational(s));
  if (pos + 5 != s.size())
    throw ValidationError("core", "parse_exact", "sqrt2 must be the trailing factor: '" + s + "'");
  std::string head = s.substr(0, pos);
  if (!head.empty() && head.back() == '*') head.pop_back();
  // split the rational part from the coefficient at the last top-level sign
  std::size_t split = std::string::npos;
  for (std::size_t i = head.size(); i-- > 1;) {
    if ((head[i] == '+' || head[i] == '-') && head[i - 1] != 'e') {
      split = i;
      break;
    }
  }
  Rational a(0);
  std::string coef = head;
  if (split != std::string::npos) {
    a = parse_rational(head.substr(0, split));
    coef = head.substr(split);
  }
  Rational b(1);
  if (coef == "-") b = -1;
  else if (coef == "+" || coef.empty()) b = 1;
  else b = parse_rational(coef);
  return ExactScalar(a, b);
}

}  // namespace bergelab
