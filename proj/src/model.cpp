#include "cpshell/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cpshell/errors.hpp"

namespace cpshell::model {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void validate(const PhysicalSystem& sys) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
  };
  positive(sys.radius_R, "radius_R");
  positive(sys.separation_d, "separation_d");
  positive(sys.atom_omega_a, "atom_omega_a");
  positive(sys.alpha0, "alpha0");
  if (!(sys.plasma_Omega >= 0.0) || !std::isfinite(sys.plasma_Omega)) {
    throw DomainError("plasma_Omega must be finite and >= 0");
  }
  if (!(sys.temperature_T >= 0.0) || !std::isfinite(sys.temperature_T)) {
    throw DomainError("temperature_T must be finite and >= 0");
  }
}

EffectiveTemperatures effective_temperatures(const PhysicalSystem& sys, const UnitSystem& units) {
  validate(sys);
  EffectiveTemperatures t;
  t.T_omega = units.hbar * sys.atom_omega_a / (kTwoPi * units.k_B);
  t.T_R = units.hbar * units.c / (kTwoPi * units.k_B * sys.radius_R);
  t.T_d = units.hbar * units.c / (kTwoPi * units.k_B * sys.separation_d);
  return t;
}

DimensionlessPoint reduce(const PhysicalSystem& sys, const UnitSystem& units) {
  const EffectiveTemperatures t = effective_temperatures(sys, units);
  DimensionlessPoint p;
  p.r = sys.separation_d / sys.radius_R;
  p.chi = 1.0 + p.r;
  p.Q = sys.plasma_Omega * sys.radius_R;
  p.q_a = sys.atom_omega_a * sys.radius_R / units.c;
  p.t_ratio_R = sys.temperature_T / t.T_R;
  p.a = (sys.temperature_T > 0.0) ? t.T_omega / sys.temperature_T : std::numeric_limits<double>::infinity();
  p.tau = 2.0 * p.r * p.t_ratio_R;
  return p;
}

PhysicalSystem expand(const DimensionlessPoint& point, double radius_R, double alpha0, const UnitSystem& units) {
  if (!(radius_R > 0.0)) throw DomainError("expand: radius_R must be positive");
  PhysicalSystem sys;
  sys.radius_R = radius_R;
  sys.separation_d = point.r * radius_R;
  sys.plasma_Omega = point.Q / radius_R;
  sys.atom_omega_a = point.q_a * units.c / radius_R;
  sys.alpha0 = alpha0;
  const double T_R = units.hbar * units.c / (kTwoPi * units.k_B * radius_R);
  sys.temperature_T = point.t_ratio_R * T_R;
  validate(sys);
  return sys;
}

double alpha_at_matsubara(const Polarizability& pol, int n, double T, const UnitSystem& units) {
  if (n < 0) throw DomainError("alpha_at_matsubara: n must be >= 0");
  if (n == 0 || pol.mode == PolarizabilityMode::static_alpha) return pol.alpha0;
  if (!(T > 0.0)) throw DomainError("alpha_at_matsubara: T must be positive for n > 0");
  const double xi = kTwoPi * n * units.k_B * T / units.hbar;
  const double ratio = xi / pol.omega_a;
  return pol.alpha0 / (1.0 + ratio * ratio);
}

Polarizability polarizability_of(const PhysicalSystem& sys, PolarizabilityMode mode) {
  return {sys.alpha0, sys.atom_omega_a, mode};
}

PhysicalSystem with_polarizability(const PhysicalSystem& sys, const Polarizability& pol) {
  PhysicalSystem out = sys;
  out.alpha0 = pol.alpha0;
  if (pol.omega_a > 0.0 || pol.mode == PolarizabilityMode::single_oscillator) out.atom_omega_a = pol.omega_a;
  validate(out);
  return out;
}

double energy_unit(const PhysicalSystem& sys, const UnitSystem& units) {
  const double R2 = sys.radius_R * sys.radius_R;
  return units.hbar * units.c * sys.alpha0 / (kTwoPi * R2 * R2);
}

double entropy_unit(const PhysicalSystem& sys, const UnitSystem& units) {
  return units.k_B * sys.alpha0 / (sys.radius_R * sys.radius_R * sys.radius_R);
}

PhysicalSystem c60_hydrogen() {
  PhysicalSystem sys;
  sys.radius_R = 0.342 * codata::nanometre;
  sys.plasma_Omega = 4.94e-2 / sys.radius_R;
  sys.atom_omega_a = 11.65 * codata::electron_volt / codata::hbar;
  sys.alpha0 = 0.667 * codata::angstrom * codata::angstrom * codata::angstrom;
  sys.separation_d = 0.5 * sys.radius_R;
  sys.temperature_T = 300.0;
  return sys;
}

std::string to_string(PolarizabilityMode mode) {
  return mode == PolarizabilityMode::static_alpha ? "static" : "single_oscillator";
}

PolarizabilityMode polarizability_mode_from_string(const std::string& name) {
  if (name == "static") return PolarizabilityMode::static_alpha;
  if (name == "single_oscillator") return PolarizabilityMode::single_oscillator;
  throw DomainError("unknown polarizability mode '" + name + "'");
}

}  // namespace cpshell::model
