#pragma once

// Multipole mode functions of the shell, shared by the Matsubara and the
// Abel-Plana routes.
//
//   g_l(x) = s^2(x) e^2(z) / f_TE + s'^2(x) [e'^2(z) + e^2(z) l(l+1)/z^2] / f_TM
//   f_TE = 1 + (Q/x) s e,   f_TM = 1 - (Q/x) s' e',   z = chi x
//
// On the real axis everything is expressed through the ratio tables of
// specfun, rescaled so that the x -> 0 limit is finite. On the imaginary
// axis g_l(-iu) is written through J, Y and H = J + iY, and g_l(+iu) is its
// complex conjugate.

#include <complex>
#include <optional>
#include <vector>

#include "cpshell/specfun.hpp"

namespace cpshell::modes {

/// TE and TM parts of g_l (without the factor Q).
struct Shares {
  double te = 0.0;
  double tm = 0.0;
  double total() const { return te + tm; }
};

struct ComplexShares {
  std::complex<double> te;
  std::complex<double> tm;
  std::complex<double> total() const { return te + tm; }
};

/// Q * sum_l nu g_l with the l-truncation actually used.
struct Sum {
  double te = 0.0;
  double tm = 0.0;
  int l_used = 0;
  double tail_bound = 0.0;
  double total() const { return te + tm; }
};

struct ComplexSum {
  std::complex<double> te;
  std::complex<double> tm;
  int l_used = 0;
  double tail_bound = 0.0;
  std::complex<double> total() const { return te + tm; }
};

/// Ratio tables at (x, chi x) for l = 1..l_max; one table serves every l.
class RealTable {
 public:
  RealTable(double x, double chi, double Q, int l_max);

  double x() const noexcept { return x_; }
  int l_max() const noexcept { return l_max_; }

  /// g_l shares, l in [1, l_max].
  Shares shares(int l) const;
  double jost_te(int l) const;
  double jost_tm(int l) const;

 private:
  double x_, z_, chi_, Q_;
  int l_max_;
  specfun::ModifiedRiccatiRatios at_x_;
  std::vector<double> e_ratio_z_;
  std::vector<Scaled> rho_;  // e_l(z) / e_l(x)
};

/// J/Y tables at (u, chi u) for g_l(+iu), l in [1, l_max].
class ImaginaryTable {
 public:
  ImaginaryTable(double u, double chi, double Q, int l_max);

  int l_max() const noexcept { return l_max_; }
  /// g_l(+iu). Throws SingularityError if a continued Jost denominator vanishes.
  ComplexShares shares(int l) const;

 private:
  double u_, w_, chi_, Q_;
  int l_max_;
  specfun::OscillatoryRiccatiTable at_u_;
  specfun::OscillatoryRiccatiTable at_w_;
};

struct JostCrossing {
  double u = 0.0;  // last scanned point before the crossing
  int l = 0;
  bool te = false;
};

/// First sign change on (0, u_max] of the real part of a continued Jost
/// denominator, l in [1, l_max]. These crossings mark the shell resonances
/// just off the imaginary axis, where g_l(+iu) is sharply peaked.
std::optional<JostCrossing> first_jost_sign_change(double Q, double u_max, int l_max);

/// Initial multipole cut-off for arguments (x, chi x).
int initial_l_max(double x, double chi, int l_cap);

/// e0(x) = Q sum_l nu g_l(x) for x >= 0. x = 0 uses the closed-form limit
/// Q g_l(0) = (l+1) chi^{-2l-2}, which does not depend on Q.
Sum sum_real(double x, double chi, double Q, double rel_tol, int l_cap);

/// Q sum_l nu g_l(+iu) for u > 0.
ComplexSum sum_imaginary(double u, double chi, double Q, double rel_tol, int l_cap);

}  // namespace cpshell::modes
