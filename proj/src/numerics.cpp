#include "cpshell/numerics.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <limits>

namespace cpshell::numerics {

DerivativeEstimate richardson_derivative(const std::function<double(double)>& f, double x, double h,
                                         double rel_tol, int max_levels) {
  std::vector<std::vector<double>> table(static_cast<std::size_t>(max_levels));
  DerivativeEstimate best;
  best.error = std::numeric_limits<double>::infinity();
  double previous_error = best.error;
  for (int i = 0; i < max_levels; ++i) {
    const double step = h / std::ldexp(1.0, i);
    auto& row = table[i];
    row.resize(static_cast<std::size_t>(i) + 1);
    row[0] = (f(x + step) - f(x - step)) / (2.0 * step);
    double factor = 4.0;
    for (int k = 1; k <= i; ++k) {
      row[k] = row[k - 1] + (row[k - 1] - table[i - 1][k - 1]) / (factor - 1.0);
      factor *= 4.0;
    }
    if (i == 0) {
      best.value = row[0];
      best.levels = 1;
      continue;
    }
    const double err = std::max(std::fabs(row[i] - row[i - 1]), std::fabs(row[i] - table[i - 1][i - 1]));
    if (err < best.error) {
      best.value = row[i];
      best.error = err;
      best.levels = i + 1;
    }
    if (err <= rel_tol * std::fabs(row[i])) break;
    if (i >= 3 && err > 2.0 * previous_error) {
      best.monotone = false;
      break;
    }
    previous_error = err;
  }
  return best;
}

QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, unsigned max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  out.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, max_depth, rel_tol,
                                                                            &out.error);
  return out;
}

QuadratureResult integrate_tanh_sinh(const std::function<double(double, double)>& f, double a,
                                     double b, double rel_tol) {
  QuadratureResult out;
  if (a == b) return out;
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  // Boost passes the complement as a signed offset from the nearer endpoint.
  auto wrapped = [&f](double t, double tc) { return f(t, std::fabs(tc)); };
  double l1 = 0.0;
  out.value = integrator.integrate(wrapped, a, b, rel_tol, &out.error, &l1);
  return out;
}

QuadratureResult integrate_exp_sinh(const std::function<double(double)>& f, double a, double rel_tol) {
  QuadratureResult out;
  static thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  double l1 = 0.0;
  out.value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &out.error, &l1);
  return out;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     const std::vector<double>& breakpoints, double rel_tol) {
  QuadratureResult out;
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto piece = integrate_gk(f, breakpoints[i], breakpoints[i + 1], rel_tol);
    sum.add(piece.value);
    out.error += piece.error;
  }
  out.value = sum.value();
  return out;
}

}  // namespace cpshell::numerics
