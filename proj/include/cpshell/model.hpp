#pragma once

// Physical inputs, their reduction to the dimensionless variables
//   r = d/R, chi = 1 + r, Q = Omega R, q_a = omega_a R / c,
//   a = T_omega / T, tau = 4 pi k_B d T / (hbar c), t_ratio_R = T / T_R
// and the single-oscillator polarizability.

#include <string>

#include "cpshell/constants.hpp"

namespace cpshell::model {

struct PhysicalSystem {
  double radius_R = 0.0;      // m
  double plasma_Omega = 0.0;  // 1/m
  double atom_omega_a = 0.0;  // rad/s
  double alpha0 = 0.0;        // m^3
  double separation_d = 0.0;  // m
  double temperature_T = 0.0; // K
};

struct DimensionlessPoint {
  double r = 0.0;
  double chi = 1.0;
  double Q = 0.0;
  double q_a = 0.0;
  double a = 0.0;          // +inf at T = 0
  double tau = 0.0;
  double t_ratio_R = 0.0;  // T / T_R
};

struct EffectiveTemperatures {
  double T_omega = 0.0;
  double T_R = 0.0;
  double T_d = 0.0;
};

enum class PolarizabilityMode { single_oscillator, static_alpha };

struct Polarizability {
  double alpha0 = 0.0;
  double omega_a = 0.0;
  PolarizabilityMode mode = PolarizabilityMode::single_oscillator;
};

/// Throws DomainError unless R, d, omega_a, alpha0 > 0, Omega >= 0, T >= 0.
void validate(const PhysicalSystem& sys);

DimensionlessPoint reduce(const PhysicalSystem& sys, const UnitSystem& units = si_units());

/// Inverse of reduce given the three scales that the reduced variables drop
/// (R, alpha0) and the unit system. Uses r, Q, q_a and t_ratio_R.
PhysicalSystem expand(const DimensionlessPoint& point, double radius_R, double alpha0,
                      const UnitSystem& units = si_units());

EffectiveTemperatures effective_temperatures(const PhysicalSystem& sys, const UnitSystem& units = si_units());

/// alpha(i xi_n) with xi_n = 2 pi n k_B T / hbar.
double alpha_at_matsubara(const Polarizability& pol, int n, double T, const UnitSystem& units = si_units());

/// Ratio alpha(i xi) / alpha(0) at reduced frequency x = xi R / c.
inline double alpha_ratio(PolarizabilityMode mode, double x, double q_a) {
  if (mode == PolarizabilityMode::static_alpha) return 1.0;
  return q_a * q_a / (x * x + q_a * q_a);
}

Polarizability polarizability_of(const PhysicalSystem& sys, PolarizabilityMode mode);

/// sys with alpha0 and omega_a taken from pol (omega_a kept when pol.omega_a
/// is 0, which a static polarizability allows); validated.
PhysicalSystem with_polarizability(const PhysicalSystem& sys, const Polarizability& pol);

/// Energy unit k_B T_R alpha0 / R^3 = hbar c alpha0 / (2 pi R^4) of the reduced formulas.
double energy_unit(const PhysicalSystem& sys, const UnitSystem& units = si_units());

/// Entropy unit k_B alpha0 / R^3.
double entropy_unit(const PhysicalSystem& sys, const UnitSystem& units = si_units());

/// C60 fullerene and a hydrogen atom: R = 0.342 nm, hbar omega_a = 11.65 eV,
/// alpha0 = 0.667 A^3, Q = 4.94e-2. Separation d = R/2 and T = 300 K.
PhysicalSystem c60_hydrogen();

std::string to_string(PolarizabilityMode mode);
PolarizabilityMode polarizability_mode_from_string(const std::string& name);

}  // namespace cpshell::model
