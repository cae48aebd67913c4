#include "cpshell/abel_plana.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cpshell/errors.hpp"
#include "cpshell/numerics.hpp"

namespace cpshell::abel_plana {

namespace {

constexpr double kPi = std::numbers::pi;
// Below this u the continued mode sums are dominated by u^3 and set to 0.
constexpr double kSmallU = 1e-60;
// Planck factors below e^{-kPlanckCut} are dropped from the thermal integrals.
constexpr double kPlanckCut = 42.0;
// e0(x) is dropped beyond 2 r x = 2 kDecayCut.
constexpr double kDecayCut = 40.0;
// Bisection depth of the thermal quadratures; the e2 slope carries ~1e-10 noise.
constexpr unsigned kThermalDepth = 8;

double quadrature_tolerance(const SeriesControl& ctrl) { return std::max(1e-14, 1e-2 * ctrl.rel_tol); }

// The imaginary part is far smaller than the real part at small u, and the
// Richardson slope differences it, so its l-series is always taken tight.
double imaginary_tolerance(const SeriesControl& ctrl) { return std::min(ctrl.rel_tol, 1e-13); }

void require_dynamic(model::PolarizabilityMode mode) {
  if (mode == model::PolarizabilityMode::static_alpha) {
    throw DomainError("the Abel-Plana split needs the single-oscillator polarizability");
  }
}

void require_point(const model::DimensionlessPoint& point) {
  if (!(point.r > 0.0)) throw DomainError("Abel-Plana route: r must be positive");
  if (!(point.Q >= 0.0)) throw DomainError("Abel-Plana route: Q must be >= 0");
  if (!(point.q_a > 0.0)) throw DomainError("Abel-Plana route: q_a must be positive");
}

double planck(double y) { return 1.0 / std::expm1(2.0 * kPi * y); }

// d/dy 1/(e^{2 pi y} - 1)
double planck_slope(double y) {
  const double p = planck(y);
  return -2.0 * kPi * p * (1.0 + p);
}

}  // namespace

std::complex<double> g_continued(int l, double t, const model::DimensionlessPoint& point) {
  specfun::BesselOrder order(l);
  if (!(t > 0.0)) throw DomainError("g_continued: t must be positive");
  if (!(point.t_ratio_R > 0.0)) throw DomainError("g_continued: needs T > 0 to scale t");
  const double u = t * point.t_ratio_R;
  return modes::ImaginaryTable(u, point.chi, point.Q, order.l()).shares(l).total();
}

modes::Sum e0_at(double x, const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  return modes::sum_real(x, point.chi, point.Q, ctrl.rel_tol, ctrl.l_max_cap);
}

modes::ComplexSum e0_continued(double u, const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  return modes::sum_imaginary(u, point.chi, point.Q, imaginary_tolerance(ctrl), ctrl.l_max_cap);
}

double e1(const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  require_point(point);
  if (point.Q == 0.0) return 0.0;
  return e0_continued(point.q_a, point, ctrl).total().real();
}

double e2(double u, const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  if (!(u >= 0.0)) throw DomainError("e2: u must be >= 0");
  if (u < kSmallU || point.Q == 0.0) return 0.0;
  return e0_continued(u, point, ctrl).total().imag();
}

ValueAndSlope e2_with_slope(double u, const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  ValueAndSlope out;
  if (u < kSmallU || point.Q == 0.0) return out;
  out.value = e2(u, point, ctrl);
  const auto f = [&](double v) { return e2(v, point, ctrl); };
  const double h = 0.25 * std::min(u, 1.0);
  out.slope = numerics::richardson_derivative(f, u, h, 1e-10, 6).value;
  return out;
}

double log_kernel(double t, double one_minus_t_abs) {
  if (one_minus_t_abs == 0.0) return std::numeric_limits<double>::infinity();
  return std::log1p(t) - std::log(one_minus_t_abs);
}

void require_resonance_free(const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  if (point.Q == 0.0 || !std::isfinite(point.a)) return;
  const double u_max = point.q_a * kPlanckCut / (2.0 * kPi * point.a);
  const int l_scan = std::min(ctrl.l_max_cap, 8 + static_cast<int>(std::ceil(2.0 * u_max)));
  if (const auto crossing = modes::first_jost_sign_change(point.Q, u_max, l_scan)) {
    throw SingularityError("thermal integration path crosses a shell resonance (" +
                               std::string(crossing->te ? "TE" : "TM") + ", l = " + std::to_string(crossing->l) +
                               ", u = " + std::to_string(crossing->u) + "); use the Matsubara route",
                           crossing->l, crossing->u);
  }
}

double integrate_thermal_kernel(const std::function<double(double, double)>& f, double a, double rel_tol) {
  const double t_max = kPlanckCut / (2.0 * kPi * a);
  numerics::CompensatedSum sum;
  if (t_max < 1.0) {
    sum.add(numerics::integrate_gk([&](double t) { return f(t, 1.0 - t); }, 0.0, t_max, rel_tol, kThermalDepth).value);
    return sum.value();
  }
  // [0, 1]: tanh-sinh sees |1 - t| exactly near the singular endpoint.
  sum.add(numerics::integrate_tanh_sinh(
              [&](double t, double dist) { return f(t, (t > 0.5) ? dist : 1.0 - t); }, 0.0, 1.0, rel_tol)
              .value);
  const double mid = std::min(2.0, t_max);
  sum.add(numerics::integrate_tanh_sinh(
              [&](double t, double dist) { return f(t, (t < 0.5 * (1.0 + mid)) ? dist : t - 1.0); }, 1.0, mid,
              rel_tol)
              .value);
  if (t_max > mid) {
    sum.add(numerics::integrate_gk([&](double t) { return f(t, t - 1.0); }, mid, t_max, rel_tol, kThermalDepth).value);
  }
  return sum.value();
}

double zero_temperature_energy_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  require_point(point);
  if (point.Q == 0.0) return 0.0;
  const double qa = point.q_a;
  const double tol = quadrature_tolerance(ctrl);
  const auto integrand = [&](double x) {
    return modes::sum_real(x, point.chi, point.Q, tol, ctrl.l_max_cap).total() / (x * x + qa * qa);
  };
  // Lorentzian width q_a, then the e^{-2 r x} decay of e0, negligible past 2 r x = 80.
  const double x_cut = kDecayCut / point.r;
  std::vector<double> breaks = {0.0, x_cut};
  for (double x : {qa, 8.0 * qa, 1.0, 0.5 / point.r, 4.0 / point.r}) {
    if (x < x_cut) breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  numerics::CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    sum.add(numerics::integrate_gk(integrand, breaks[i], breaks[i + 1], tol).value);
  }
  return -2.0 * qa * qa / (point.chi * point.chi) * sum.value();
}

double thermal_correction_1_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  require_point(point);
  if (point.Q == 0.0 || !std::isfinite(point.a)) return 0.0;
  const double occupation = planck(point.a);
  if (occupation == 0.0) return 0.0;
  return -2.0 * kPi * point.q_a * e1(point, ctrl) * occupation / (point.chi * point.chi);
}

double thermal_correction_2_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  require_point(point);
  if (point.Q == 0.0 || !std::isfinite(point.a)) return 0.0;
  require_resonance_free(point, ctrl);
  const double a = point.a;
  const double qa = point.q_a;
  const auto integrand = [&](double t, double one_minus_t) {
    const double u = qa * t;
    if (u < kSmallU) return 0.0;
    const double p = planck(a * t);
    if (p == 0.0) return 0.0;
    const ValueAndSlope e = e2_with_slope(u, point, ctrl);
    const double bracket_slope = qa * e.slope * p + a * e.value * planck_slope(a * t);
    return bracket_slope * log_kernel(t, one_minus_t);
  };
  const double integral = integrate_thermal_kernel(integrand, a, quadrature_tolerance(ctrl));
  return -2.0 * qa / (point.chi * point.chi) * integral;
}

AbelPlanaBreakdown free_energy_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl) {
  AbelPlanaBreakdown out;
  out.E0 = zero_temperature_energy_reduced(point, ctrl);
  out.F1 = thermal_correction_1_reduced(point, ctrl);
  out.F2 = thermal_correction_2_reduced(point, ctrl);
  out.total = out.E0 + out.F1 + out.F2;
  return out;
}

namespace {

struct Prepared {
  model::DimensionlessPoint point;
  double unit;
};

Prepared prepare(const model::PhysicalSystem& sys, const model::Polarizability& pol, const UnitSystem& units) {
  require_dynamic(pol.mode);
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  return {model::reduce(merged, units), model::energy_unit(merged, units)};
}

}  // namespace

double zero_temperature_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                               const SeriesControl& ctrl, const UnitSystem& units) {
  const Prepared p = prepare(sys, pol, units);
  return p.unit * zero_temperature_energy_reduced(p.point, ctrl);
}

double thermal_correction_1(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const UnitSystem& units) {
  const Prepared p = prepare(sys, pol, units);
  return p.unit * thermal_correction_1_reduced(p.point, SeriesControl{});
}

double thermal_correction_2(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const SeriesControl& ctrl, const UnitSystem& units) {
  const Prepared p = prepare(sys, pol, units);
  return p.unit * thermal_correction_2_reduced(p.point, ctrl);
}

AbelPlanaBreakdown free_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                               const SeriesControl& ctrl, const UnitSystem& units) {
  const Prepared p = prepare(sys, pol, units);
  AbelPlanaBreakdown out = free_energy_reduced(p.point, ctrl);
  out.E0 *= p.unit;
  out.F1 *= p.unit;
  out.F2 *= p.unit;
  out.total = out.E0 + out.F1 + out.F2;
  return out;
}

}  // namespace cpshell::abel_plana
