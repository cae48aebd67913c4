#include "cpshell/entropy.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "cpshell/abel_plana.hpp"
#include "cpshell/asymptotics.hpp"
#include "cpshell/errors.hpp"
#include "cpshell/numerics.hpp"

namespace cpshell::entropy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFdLevels = 6;
constexpr double kFdTolerance = 1e-8;
constexpr int kSigmaGrid = 200;

void require_dynamic(const model::Polarizability& pol, const char* who) {
  if (pol.mode == model::PolarizabilityMode::static_alpha) {
    throw DomainError(std::string(who) + " needs the single-oscillator polarizability");
  }
}

// (pi a / sinh(pi a t))^2 in log space.
double damping(double a, double t) {
  const double y = kPi * a * t;
  return std::exp(2.0 * (std::log(kPi * a) - numerics::log_sinh(y)));
}

double s1_reduced(const model::DimensionlessPoint& p, const SeriesControl& ctrl) {
  if (p.Q == 0.0) return 0.0;
  const double d = damping(p.a, 1.0);
  if (d == 0.0) return 0.0;
  return abel_plana::e1(p, ctrl) * d / (p.chi * p.chi);
}

double s2_reduced(const model::DimensionlessPoint& p, const SeriesControl& ctrl) {
  if (p.Q == 0.0) return 0.0;
  abel_plana::require_resonance_free(p, ctrl);
  const double a = p.a;
  const double qa = p.q_a;
  const auto integrand = [&](double t, double one_minus_t) {
    if (!(t > 0.0)) return 0.0;
    const double d = damping(a, t);
    if (d == 0.0) return 0.0;
    const abel_plana::ValueAndSlope e = abel_plana::e2_with_slope(qa * t, p, ctrl);
    if (e.value == 0.0 && e.slope == 0.0) return 0.0;
    const double y = kPi * a * t;
    const double bracket = t * qa * e.slope + e.value * (1.0 - 2.0 * y / std::tanh(y));
    return bracket * abel_plana::log_kernel(t, one_minus_t) * d;
  };
  const double tol = std::max(1e-14, 1e-2 * ctrl.rel_tol);
  return abel_plana::integrate_thermal_kernel(integrand, a, tol) / (kPi * p.chi * p.chi);
}

void require_positive_temperature(const model::PhysicalSystem& sys, const char* who) {
  if (!(sys.temperature_T > 0.0)) throw DomainError(std::string(who) + ": T must be positive");
}

// Noise is judged against max(|f'|, floor), so a negligible share of a larger
// total is not rejected for its relative noise alone.
double checked_derivative(const std::function<double(double)>& f, double T, double floor = 0.0) {
  const numerics::DerivativeEstimate d = numerics::richardson_derivative(f, T, T / 50.0, kFdTolerance, kFdLevels);
  const double scale = std::max(std::fabs(d.value), floor);
  if (!std::isfinite(d.value) || (!d.monotone && d.error > 1e-6 * scale) || d.error > 1e-4 * scale) {
    std::ostringstream msg;
    msg << std::scientific << std::setprecision(3) << "entropy_fd: finite differences are dominated by noise (estimate "
        << d.value << ", error " << d.error << ")";
    throw PrecisionError(msg.str());
  }
  return d.value;
}

}  // namespace

EntropyBreakdown entropy_analytic(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                  const SeriesControl& ctrl, const UnitSystem& units) {
  require_dynamic(pol, "entropy_analytic");
  matsubara::validate(ctrl);
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  require_positive_temperature(merged, "entropy_analytic");
  const model::DimensionlessPoint p = model::reduce(merged, units);
  const double unit = model::entropy_unit(merged, units);
  EntropyBreakdown out;
  out.route = Route::analytic;
  out.s1 = unit * s1_reduced(p, ctrl);
  out.s2 = unit * s2_reduced(p, ctrl);
  out.total = *out.s1 + *out.s2;
  return out;
}

EntropyBreakdown entropy_fd(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const SeriesControl& ctrl, FdSource source, const UnitSystem& units) {
  matsubara::validate(ctrl);
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  require_positive_temperature(merged, "entropy_fd");
  const double T = merged.temperature_T;
  if (source == FdSource::automatic) {
    const bool use_matsubara = pol.mode == model::PolarizabilityMode::static_alpha ||
                               model::reduce(merged, units).a <= 1.0;
    source = use_matsubara ? FdSource::matsubara : FdSource::abel_plana_thermal;
  }
  const auto at = [&](double temperature) {
    model::PhysicalSystem s = merged;
    s.temperature_T = temperature;
    return s;
  };
  EntropyBreakdown out;
  out.route = Route::finite_difference;
  if (source == FdSource::matsubara) {
    const auto f = [&](double temperature) { return matsubara::free_energy(at(temperature), pol, ctrl, units).total; };
    out.total = -checked_derivative(f, T);
    return out;
  }
  require_dynamic(pol, "entropy_fd from the Abel-Plana thermal part");
  const double unit = model::energy_unit(merged, units);
  const auto f1 = [&](double temperature) {
    return unit * abel_plana::thermal_correction_1_reduced(model::reduce(at(temperature), units), ctrl);
  };
  const auto f2 = [&](double temperature) {
    return unit * abel_plana::thermal_correction_2_reduced(model::reduce(at(temperature), units), ctrl);
  };
  out.s2 = -checked_derivative(f2, T);
  out.s1 = -checked_derivative(f1, T, std::fabs(*out.s2));
  out.total = *out.s1 + *out.s2;
  return out;
}

double high_temperature_entropy_coefficient(double r) { return matsubara::zero_mode_coefficient(r); }

double low_temperature_entropy(const model::PhysicalSystem& sys, const UnitSystem& units) {
  model::validate(sys);
  const double chi = 1.0 + sys.separation_d / sys.radius_R;
  const double chi3 = chi * chi * chi;
  const double k = units.k_B * sys.temperature_T / (units.hbar * units.c);
  return (16.0 * kPi * kPi * kPi / 15.0) * units.k_B * sys.alpha0 * k * k * k / (chi3 * chi3);
}

double sigma(double r, double tau, const SeriesControl& ctrl) {
  if (!(r >= 0.0)) throw DomainError("sigma: r must be >= 0");
  const double d0 = asymptotics::eta0_with_derivative(tau).derivative;
  if (r == 0.0) return d0;
  return d0 + r * asymptotics::eta1_with_derivative(tau, ctrl).derivative;
}

SigmaCurve sigma_curve(double r, const std::vector<double>& tau_grid, const SeriesControl& ctrl) {
  SigmaCurve out;
  out.r = r;
  out.tau_grid = tau_grid;
  out.sigma_values.reserve(tau_grid.size());
  for (double tau : tau_grid) out.sigma_values.push_back(sigma(r, tau, ctrl));
  if (out.sigma_values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.sigma_values.begin(), out.sigma_values.end());
  if (*lo < 0.0 && *hi > 0.0) {
    double first = 0.0;
    double last = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
      if (out.sigma_values[i] < 0.0) {
        if (!seen) first = tau_grid[i];
        last = tau_grid[i];
        seen = true;
      }
    }
    out.sign_change = std::make_pair(first, last);
  }
  return out;
}

SigmaMinimum sigma_minimum(double r, double tau_min, double tau_max, const SeriesControl& ctrl) {
  if (!(tau_min > 0.0) || !(tau_max > tau_min)) throw DomainError("sigma_minimum: need 0 < tau_min < tau_max");
  std::vector<double> grid(kSigmaGrid);
  const double step = std::log(tau_max / tau_min) / (kSigmaGrid - 1);
  for (int i = 0; i < kSigmaGrid; ++i) grid[i] = tau_min * std::exp(step * i);
  grid.back() = tau_max;
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = sigma(r, grid[i], ctrl);
    if (s < best_value) {
      best_value = s;
      best = i;
    }
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  const auto f = [&](double tau) { return sigma(r, tau, ctrl); };
  const auto [tau, value] = boost::math::tools::brent_find_minima(f, a, b, 40);
  if (value < best_value) return {tau, value};
  return {grid[best], best_value};
}

double find_sign_change_threshold(std::pair<double, double> tau_range, double tolerance,
                                  const SeriesControl& ctrl, double r_low, double r_high) {
  if (!(tolerance > 0.0)) throw DomainError("find_sign_change_threshold: tolerance must be positive");
  if (!(r_low >= 0.0) || !(r_high > r_low)) throw DomainError("find_sign_change_threshold: need 0 <= r_low < r_high");
  const auto min_sigma = [&](double r) { return sigma_minimum(r, tau_range.first, tau_range.second, ctrl).sigma; };
  if (!(min_sigma(r_low) < 0.0)) throw SearchError("find_sign_change_threshold: sigma has no negative region at r_low");
  if (!(min_sigma(r_high) >= 0.0)) throw SearchError("find_sign_change_threshold: sigma still negative at r_high");
  double lo = r_low;
  double hi = r_high;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (min_sigma(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cpshell::entropy
