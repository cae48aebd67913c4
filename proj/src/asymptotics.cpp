#include "cpshell/asymptotics.hpp"

#include <algorithm>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "cpshell/abel_plana.hpp"
#include "cpshell/errors.hpp"
#include "cpshell/numerics.hpp"

namespace cpshell::asymptotics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kStopRun = 3;

// Value and first derivative carried through the elementary eta brackets.
struct Dual {
  double v;
  double d;
};
Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator*(double s, Dual a) { return {s * a.v, s * a.d}; }
Dual operator+(double s, Dual a) { return {s + a.v, a.d}; }

// P = 1/(e^tau - 1), dP/dtau = -P(1 + P).
Dual planck_dual(double tau) {
  const double p = 1.0 / std::expm1(tau);
  return {p, -p * (1.0 + p)};
}

Dual eta0_dual(double tau) {
  const Dual t{tau, 1.0};
  const Dual p = planck_dual(tau);
  const Dual p1 = 1.0 + p;
  const Dual bracket = 1.0 + 2.0 * p + 2.0 * (t * p * p1) + (t * t) * p * p1 * (1.0 + 2.0 * p);
  return (1.0 / 6.0) * (t * bracket);
}

Dual eta1_elementary_dual(double tau) {
  const Dual t{tau, 1.0};
  const Dual p = planck_dual(tau);
  const Dual p1 = 1.0 + p;
  const Dual quartic = p + 6.0 * (p * p) + 6.0 * (p * p * p);
  const Dual bracket = 1.0 + 2.0 * p + 2.0 * (t * p * p1) + 1.5 * ((t * t) * p * p1 * (1.0 + 2.0 * p)) +
                       0.5 * ((t * t * t) * p1 * quartic);
  return (-1.0 / 6.0) * (t * bracket);
}

void require_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("eta: tau must be positive and finite");
}

double quadrature_tolerance(const SeriesControl& ctrl) { return std::max(1e-14, 1e-2 * ctrl.rel_tol); }

// J_k(tau) = h^k int_h^inf cosh t / (t sinh^k t) dt with h = tau/2, written
// over v = t/h so the small-tau endpoint behaviour stays O(1).
double scaled_endpoint_integral(int k, double tau, const SeriesControl& ctrl) {
  const double h = 0.5 * tau;
  const auto f = [h, k](double v) {
    const double s = v * h;
    const double ratio = h / std::sinh(s);
    if (ratio == 0.0) return 0.0;
    return std::pow(ratio, k - 1) * (h / std::tanh(s)) / v;
  };
  const double tol = quadrature_tolerance(ctrl);
  const auto res = numerics::integrate_exp_sinh(f, 1.0, tol);
  if (!(res.error <= 1e3 * tol * std::fabs(res.value)) || !std::isfinite(res.value)) {
    throw ConvergenceError("eta1: endpoint integral did not converge", res.value, res.error);
  }
  return res.value;
}

// h^k cosh h / (h sinh^k h), h = tau/2: the integrand of J_k at its lower limit.
double scaled_endpoint_value(int k, double tau) {
  const double h = 0.5 * tau;
  const double ratio = h / std::sinh(h);
  if (ratio == 0.0) return 0.0;
  return std::pow(ratio, k - 1) / std::tanh(h);
}

ValidityCheck much_less(std::string name, double lhs, double rhs) {
  ValidityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = (rhs > 0.0) ? lhs / rhs : std::numeric_limits<double>::infinity();
  c.holds = c.slack < 1.0;
  return c;
}

void apply(const RegimeResult& result, RegimePolicy policy) {
  if (policy == RegimePolicy::enforce && !result.valid()) {
    std::string which;
    for (const auto& c : result.validity) {
      if (!c.holds) which += (which.empty() ? "" : ", ") + c.name;
    }
    throw RegimeError(to_string(result.regime) + " law outside its validity region (" + which + ")",
                      result.worst_slack());
  }
}

void require_dynamic(const model::Polarizability& pol, const char* who) {
  if (pol.mode == model::PolarizabilityMode::static_alpha) {
    throw DomainError(std::string(who) + " needs the single-oscillator polarizability");
  }
}

// The flat-plate k-integral at reduced frequency kappa = xi d / c, in units
// where the leading plate term sums to E_CP.
double plate_integral(double kappa, double r, bool corrections) {
  const double e = std::exp(-2.0 * kappa);
  const double k2 = kappa * kappa;
  const double g2 = e * (2.0 * k2 + 2.0 * kappa + 1.0) / 4.0;
  if (!corrections) return g2;
  const double g1 = e * (2.0 * kappa + 1.0) / 4.0;
  const double g3 = e * (4.0 * k2 * kappa + 6.0 * k2 + 6.0 * kappa + 3.0) / 8.0;
  double expint_part = 0.0;
  if (kappa > 0.0) {
    const double y = 2.0 * kappa;
    expint_part = -2.0 * k2 * boost::math::expint(1, y) + k2 * boost::math::expint(3, y);
  }
  return (1.0 - 3.0 * r) * g2 + 0.5 * r * (g1 + expint_part) + r * (g3 - k2 * g1);
}

}  // namespace

double RegimeResult::worst_slack() const {
  double worst = 0.0;
  for (const auto& c : validity) worst = std::max(worst, c.slack);
  return worst;
}

bool RegimeResult::valid() const {
  return std::all_of(validity.begin(), validity.end(), [](const ValidityCheck& c) { return c.holds; });
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::flat_plate:
      return "flat_plate";
    case Regime::low_T:
      return "low_T";
    case Regime::high_T:
      return "high_T";
    case Regime::short_distance:
      return "short_distance";
  }
  return "unknown";
}

double casimir_polder_energy(double alpha0, double d, const UnitSystem& units) {
  if (!(d > 0.0)) throw DomainError("casimir_polder_energy: d must be positive");
  if (!(alpha0 >= 0.0)) throw DomainError("casimir_polder_energy: alpha0 must be >= 0");
  const double d2 = d * d;
  return -3.0 * units.hbar * units.c * alpha0 / (8.0 * kPi * d2 * d2);
}

double flat_plate_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                         const SeriesControl& ctrl, bool include_corrections, const UnitSystem& units) {
  matsubara::validate(ctrl);
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  const model::DimensionlessPoint p = model::reduce(merged, units);
  const double e_cp = casimir_polder_energy(merged.alpha0, merged.separation_d, units);
  const bool is_static = pol.mode == model::PolarizabilityMode::static_alpha;
  // Oscillator width in kappa.
  const double kappa_a = p.q_a * p.r;
  const auto ratio = [&](double kappa) {
    if (is_static) return 1.0;
    const double s = kappa / kappa_a;
    return 1.0 / (1.0 + s * s);
  };
  const auto term = [&](double kappa) { return ratio(kappa) * plate_integral(kappa, p.r, include_corrections); };

  if (merged.temperature_T == 0.0) {
    const double tol = quadrature_tolerance(ctrl);
    numerics::CompensatedSum sum;
    if (!is_static) sum.add(numerics::integrate_gk(term, 0.0, kappa_a, tol).value);
    sum.add(numerics::integrate_exp_sinh(term, is_static ? 0.0 : kappa_a, tol).value);
    return e_cp * (8.0 / 3.0) * sum.value();
  }

  const double tau = p.tau;
  const double floor = (ctrl.abs_floor > 0.0) ? ctrl.abs_floor / std::fabs(e_cp) : 0.0;
  numerics::CompensatedSum sum;
  sum.add(0.5 * term(0.0));
  int run = 0;
  for (std::int64_t n = 1;; ++n) {
    if (n > ctrl.n_max_cap) {
      throw ConvergenceError("flat_plate_energy: n-sum reached its cap", e_cp * (4.0 * tau / 3.0) * sum.value(),
                             e_cp * (4.0 * tau / 3.0) * term(0.5 * static_cast<double>(n) * tau));
    }
    const double t = term(0.5 * static_cast<double>(n) * tau);
    sum.add(t);
    const double weighted = (4.0 * tau / 3.0) * std::fabs(t) * static_cast<double>(n);
    const double partial = (4.0 * tau / 3.0) * std::fabs(sum.value());
    run = (weighted < std::max(ctrl.rel_tol * partial, floor)) ? run + 1 : 0;
    if (run >= kStopRun) break;
  }
  return e_cp * (4.0 * tau / 3.0) * sum.value();
}

double low_temperature_coefficient(double r) {
  if (!(r > 0.0)) throw DomainError("low_temperature_coefficient: r must be positive");
  const double chi3 = (1.0 + r) * (1.0 + r) * (1.0 + r);
  return 2.0 * r * r * r * r / (45.0 * chi3 * chi3);
}

RegimeResult low_temperature_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                    const SeriesControl& ctrl, RegimePolicy policy, const UnitSystem& units) {
  require_dynamic(pol, "low_temperature_energy");
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  const model::DimensionlessPoint p = model::reduce(merged, units);
  const model::EffectiveTemperatures t = model::effective_temperatures(merged, units);
  RegimeResult out;
  out.regime = Regime::low_T;
  const double T = merged.temperature_T;
  out.validity.push_back(much_less("T << T_omega", T, t.T_omega));
  out.validity.push_back(much_less("T << T_R", T, t.T_R));
  out.validity.push_back(much_less("T << T_d R/(R+d)", T, t.T_d / p.chi));
  out.validity.push_back(much_less("T/T_R << Q", p.t_ratio_R, p.Q));
  apply(out, policy);
  const double e0 = abel_plana::zero_temperature_energy(merged, pol, ctrl, units);
  const double e_cp = casimir_polder_energy(merged.alpha0, merged.separation_d, units);
  const double s4 = p.t_ratio_R * p.t_ratio_R * p.t_ratio_R * p.t_ratio_R;
  out.value = e0 + e_cp * low_temperature_coefficient(p.r) * s4;
  return out;
}

double high_temperature_coefficient(double r) {
  if (!(r > 0.0)) throw DomainError("high_temperature_coefficient: r must be positive");
  const double poly = (((6.0 * r + 24.0) * r + 33.0) * r + 18.0) * r + 4.0;
  const double r1 = (1.0 + r) * (1.0 + r);
  return 2.0 * r * poly / (3.0 * r1 * r1 * (r + 2.0) * (r + 2.0) * (r + 2.0));
}

RegimeResult high_temperature_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                     RegimePolicy policy, const UnitSystem& units) {
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  const model::DimensionlessPoint p = model::reduce(merged, units);
  const model::EffectiveTemperatures t = model::effective_temperatures(merged, units);
  RegimeResult out;
  out.regime = Regime::high_T;
  const double T = merged.temperature_T;
  if (pol.mode != model::PolarizabilityMode::static_alpha) {
    out.validity.push_back(much_less("T_omega << T", t.T_omega, T));
  }
  out.validity.push_back(much_less("T_R << T", t.T_R, T));
  out.validity.push_back(much_less("T_d << T", t.T_d, T));
  apply(out, policy);
  out.value = matsubara::zero_mode(p, merged.alpha0, T, merged.radius_R, units);
  return out;
}

RegimeResult short_distance_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                   RegimePolicy policy, const UnitSystem& units) {
  require_dynamic(pol, "short_distance_energy");
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  const model::DimensionlessPoint p = model::reduce(merged, units);
  RegimeResult out;
  out.regime = Regime::short_distance;
  out.validity.push_back(much_less("r << Q", p.r, p.Q));
  apply(out, policy);
  const double quantum = units.hbar * merged.atom_omega_a;
  const double T = merged.temperature_T;
  const double occupation = (T > 0.0) ? numerics::planck_occupation(quantum / (units.k_B * T)) : 0.0;
  const double d = merged.separation_d;
  out.value = -(merged.alpha0 / (4.0 * d * d * d)) * (0.5 * quantum + quantum * occupation);
  return out;
}

double eta0(double tau) { return eta0_with_derivative(tau).value; }

ValueAndDerivative eta0_with_derivative(double tau) {
  require_tau(tau);
  const Dual e = eta0_dual(tau);
  return {e.v, e.d};
}

double eta1(double tau, const SeriesControl& ctrl) {
  require_tau(tau);
  const double j5 = scaled_endpoint_integral(5, tau, ctrl);
  const double j3 = scaled_endpoint_integral(3, tau, ctrl);
  return eta1_elementary_dual(tau).v + 2.0 * j5 + (tau * tau - 4.0) * j3 / 6.0;
}

ValueAndDerivative eta1_with_derivative(double tau, const SeriesControl& ctrl) {
  require_tau(tau);
  const Dual el = eta1_elementary_dual(tau);
  const double j5 = scaled_endpoint_integral(5, tau, ctrl);
  const double j3 = scaled_endpoint_integral(3, tau, ctrl);
  // dJ_k/dtau = k J_k / tau - (lower-limit integrand) / 2.
  const double dj5 = 5.0 * j5 / tau - 0.5 * scaled_endpoint_value(5, tau);
  const double dj3 = 3.0 * j3 / tau - 0.5 * scaled_endpoint_value(3, tau);
  ValueAndDerivative out;
  out.value = el.v + 2.0 * j5 + (tau * tau - 4.0) * j3 / 6.0;
  out.derivative = el.d + 2.0 * dj5 + tau * j3 / 3.0 + (tau * tau - 4.0) * dj3 / 6.0;
  return out;
}

}  // namespace cpshell::asymptotics
