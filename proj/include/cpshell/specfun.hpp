#pragma once

// Riccati-Bessel functions of half-integer order.
//
//   s_l(x) = sqrt(pi x / 2) I_{l+1/2}(x)     e_l(x) = sqrt(2 x / pi) K_{l+1/2}(x)
//   J_l(x) = x j_l(x)   Y_l(x) = x y_l(x)   H_l = J_l + i Y_l
//
// Wronskians: s e' - s' e = -1 and J Y' - J' Y = 1.
//
// The e-family is built by upward recurrence of the ratio e_l/e_{l-1}, the
// s-family by backward recurrence of s_l/s_{l-1} started from a continued
// fraction. Absolute values are produced from the ratios with a shared
// binary exponent, so the products s*e needed by the mode sums never overflow.

#include <vector>

#include "cpshell/scaled.hpp"

namespace cpshell::specfun {

inline constexpr int kMaxOrder = 5000;

/// Multipole index l >= 1 and its half-integer Bessel order nu = l + 1/2.
class BesselOrder {
 public:
  explicit BesselOrder(int l);
  int l() const noexcept { return l_; }
  double nu() const noexcept { return l_ + 0.5; }

 private:
  int l_;
};

/// s, s', e, e' at one (l, x). Stored fields are mantissas: the true values
/// are s * 2^s_exponent, s_prime * 2^s_exponent, e * 2^e_exponent, ...
struct RiccatiPair {
  double s = 0, s_prime = 0, e = 0, e_prime = 0;
  long s_exponent = 0, e_exponent = 0;

  double s_value() const;
  double s_prime_value() const;
  double e_value() const;
  double e_prime_value() const;
  /// s e' - s' e, evaluated in scaled arithmetic.
  double wronskian() const;
};

/// J, J', Y, Y' at one (l, x) with separate binary exponents.
struct OscillatoryRiccatiPair {
  double j = 0, j_prime = 0, y = 0, y_prime = 0;
  long j_exponent = 0, y_exponent = 0;

  double j_value() const;
  double j_prime_value() const;
  double y_value() const;
  double y_prime_value() const;
  /// J Y' - J' Y.
  double wronskian() const;
};

RiccatiPair riccati_ik(BesselOrder order, double x);
OscillatoryRiccatiPair riccati_jy(BesselOrder order, double x);

/// Leading uniform (Debye) value of nu * Q * g_l(x) in the ideal-conductor
/// limit Q -> infinity, which bounds nu * Q * g_l for every finite Q:
///   [nu^2 (1/t + t) / (2 chi) + x z t / 2] exp(-2 nu [eta(z/nu) - eta(x/nu)]),  t = t(z/nu).
/// Only meant for truncation bounds. Requires nu >= 10 max(1, x, z) and z >= x.
double debye_tail_estimate(BesselOrder order, double x, double z);

/// Sum over l > order.l() of debye_tail_estimate, bounded geometrically.
double debye_tail_sum(BesselOrder order, double x, double z);

/// Ratio tables for the modified family at a single real argument x > 0.
class ModifiedRiccatiRatios {
 public:
  /// Builds ratios for l = 1..l_max (s ratios up to l_max + 1).
  ModifiedRiccatiRatios(double x, int l_max);

  double x() const noexcept { return x_; }
  int l_max() const noexcept { return l_max_; }

  /// e_l / e_{l-1}, l in [1, l_max].
  double e_ratio(int l) const { return e_ratio_[l]; }
  /// s_l / s_{l-1}, l in [1, l_max + 1].
  double s_ratio(int l) const { return s_ratio_[l]; }
  /// s_l(x) e_l(x) from the Wronskian s_l e_{l-1} + s_{l-1} e_l = 1.
  double se_product(int l) const { return 1.0 / (1.0 / e_ratio_[l] + 1.0 / s_ratio_[l]); }
  /// s'_l / s_l = (l+1)/x + s_{l+1}/s_l (positive).
  double s_log_derivative(int l) const { return (l + 1) / x_ + s_ratio_[l + 1]; }
  /// -e'_l / e_l = l/x + e_{l-1}/e_l (positive).
  double e_log_derivative_abs(int l) const { return l / x_ + 1.0 / e_ratio_[l]; }

 private:
  double x_;
  int l_max_;
  std::vector<double> e_ratio_;
  std::vector<double> s_ratio_;
};

/// e_l(y)/e_{l-1}(y) for l = 1..l_max; upward recurrence, always stable.
std::vector<double> e_ratios(double y, int l_max);

/// s_{l}/s_{l-1} at x from the continued fraction (used to seed backward recurrence).
double s_ratio_continued_fraction(int l, double x);

/// J_l, Y_l for l = -1..l_max at one real argument u > 0 in scaled form.
class OscillatoryRiccatiTable {
 public:
  OscillatoryRiccatiTable(double u, int l_max);

  double u() const noexcept { return u_; }
  int l_max() const noexcept { return l_max_; }

  const Scaled& j(int l) const { return j_[l + 1]; }
  const Scaled& y(int l) const { return y_[l + 1]; }
  Scaled j_prime(int l) const { return j(l - 1) - j(l) * (l / u_); }
  Scaled y_prime(int l) const { return y(l - 1) - y(l) * (l / u_); }

 private:
  double u_;
  int l_max_;
  std::vector<Scaled> j_;
  std::vector<Scaled> y_;
};

}  // namespace cpshell::specfun
