#pragma once

#include <cmath>
#include <numbers>

namespace cpshell {

/// Real number stored as mantissa * 2^exponent. Used for Bessel values whose
/// magnitude leaves the double range (x^{-l} at small x, e^{x} at large x)
/// while the products the physics needs stay O(1).
struct Scaled {
  double mantissa = 0.0;
  long exponent = 0;

  static Scaled from(double v) {
    int e = 0;
    const double m = std::frexp(v, &e);
    return {m, e};
  }

  /// e^y without overflow or underflow.
  static Scaled exp_of(double y) {
    const double k = std::floor(y / std::numbers::ln2);
    const double rem = y - k * std::numbers::ln2;
    Scaled s = from(std::exp(rem));
    s.exponent += static_cast<long>(k);
    return s;
  }

  double value() const {
    if (mantissa == 0.0) return 0.0;
    if (exponent > 2100) return std::copysign(HUGE_VAL, mantissa);
    if (exponent < -2200) return std::copysign(0.0, mantissa);
    return std::ldexp(mantissa, static_cast<int>(exponent));
  }

  /// Natural log of |value|.
  double log_abs() const {
    return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::numbers::ln2;
  }

  bool is_zero() const { return mantissa == 0.0; }

  Scaled normalized() const {
    if (mantissa == 0.0) return {0.0, 0};
    int e = 0;
    const double m = std::frexp(mantissa, &e);
    return {m, exponent + e};
  }

  friend Scaled operator*(Scaled a, Scaled b) {
    return Scaled{a.mantissa * b.mantissa, a.exponent + b.exponent}.normalized();
  }
  friend Scaled operator*(Scaled a, double b) { return Scaled{a.mantissa * b, a.exponent}.normalized(); }
  friend Scaled operator*(double b, Scaled a) { return a * b; }
  friend Scaled operator/(Scaled a, Scaled b) {
    return Scaled{a.mantissa / b.mantissa, a.exponent - b.exponent}.normalized();
  }
  friend Scaled operator/(double a, Scaled b) { return Scaled::from(a) / b; }

  friend Scaled operator+(Scaled a, Scaled b) {
    if (a.mantissa == 0.0) return b;
    if (b.mantissa == 0.0) return a;
    if (a.exponent < b.exponent) std::swap(a, b);
    const long shift = b.exponent - a.exponent;
    if (shift < -1100) return a;
    return Scaled{a.mantissa + std::ldexp(b.mantissa, static_cast<int>(shift)), a.exponent}.normalized();
  }
  friend Scaled operator-(Scaled a) { return {-a.mantissa, a.exponent}; }
  friend Scaled operator-(Scaled a, Scaled b) { return a + (-b); }
};

}  // namespace cpshell
