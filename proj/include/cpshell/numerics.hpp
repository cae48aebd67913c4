#pragma once

// Small numerical toolbox shared by the energy and entropy routes:
// compensated summation, Richardson-extrapolated central differences and
// thin wrappers over Boost.Math quadrature.

#include <cmath>
#include <functional>
#include <vector>

namespace cpshell::numerics {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct DerivativeEstimate {
  double value = 0.0;
  double error = 0.0;
  int levels = 0;
  bool monotone = true;  // false if the tableau error stopped decreasing before tol was met
};

/// f'(x) from central differences with steps h, h/2, h/4, ... and a Neville
/// tableau in h^2. Stops at rel_tol or when the error estimate grows.
DerivativeEstimate richardson_derivative(const std::function<double(double)>& f, double x, double h,
                                         double rel_tol = 1e-10, int max_levels = 8);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (G10/K21) on a finite interval.
QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, unsigned max_depth = 15);

/// Tanh-sinh on a finite interval; f receives (t, distance to nearest endpoint)
/// so integrable endpoint singularities such as ln|1 - t| keep full precision.
QuadratureResult integrate_tanh_sinh(const std::function<double(double, double)>& f, double a,
                                     double b, double rel_tol);

/// Exp-sinh on [a, infinity).
QuadratureResult integrate_exp_sinh(const std::function<double(double)>& f, double a, double rel_tol);

/// Integrates over consecutive breakpoints with integrate_gk and sums.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     const std::vector<double>& breakpoints, double rel_tol);

/// ln sinh(y) for y > 0 without overflow.
inline double log_sinh(double y) {
  if (y > 1.0) return y + std::log1p(-std::exp(-2.0 * y)) - std::log(2.0);
  return std::log(std::sinh(y));
}

/// 1/(e^{y} - 1) for y > 0.
inline double planck_occupation(double y) { return 1.0 / std::expm1(y); }

}  // namespace cpshell::numerics
