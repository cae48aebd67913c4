#pragma once

// Closed-form limits of the free energy: the flat plate with its 1/R
// corrections, the low- and high-temperature laws, the short-distance law,
// and the static-polarizability functions eta0, eta1 with
//
//   F = E_CP (eta0(tau) + r eta1(tau)),  E_CP = -3 hbar c alpha0 / (8 pi d^4),
//   tau = 4 pi k_B d T / (hbar c).

#include <string>
#include <vector>

#include "cpshell/matsubara.hpp"

namespace cpshell::asymptotics {

using matsubara::SeriesControl;

enum class Regime { flat_plate, low_T, high_T, short_distance };

/// One assumed inequality lhs << rhs; slack = lhs / rhs.
struct ValidityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = true;  // slack < 1
};

struct RegimeResult {
  double value = 0.0;  // J
  Regime regime = Regime::low_T;
  std::vector<ValidityCheck> validity;

  /// Largest slack over the checks, 0 if there are none.
  double worst_slack() const;
  bool valid() const;
};

/// report: always return the value with its checks. enforce: throw
/// RegimeError carrying the worst slack when a check fails.
enum class RegimePolicy { report, enforce };

std::string to_string(Regime regime);

/// -3 hbar c alpha0 / (8 pi d^4).
double casimir_polder_energy(double alpha0, double d, const UnitSystem& units = si_units());

/// Flat ideal plate at distance d with, optionally, the three O(1/R) terms.
/// The k-integrals are done in closed form; the n-sum stops like the
/// Matsubara series. T = 0 is handled by the integral over frequency.
double flat_plate_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                         const SeriesControl& ctrl, bool include_corrections,
                         const UnitSystem& units = si_units());

/// 2 r^4 / (45 (1+r)^6).
double low_temperature_coefficient(double r);

/// E_CP (S_Omega + S_T (T/T_R)^4) with S_Omega = E0 / E_CP from the Abel-Plana route.
RegimeResult low_temperature_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                    const SeriesControl& ctrl = {}, RegimePolicy policy = RegimePolicy::enforce,
                                    const UnitSystem& units = si_units());

/// 2 r (6r^4+24r^3+33r^2+18r+4) / (3 (r+1)^4 (r+2)^3), so that the high-T
/// energy is E_CP times this times T/T_R.
double high_temperature_coefficient(double r);

/// The zero Matsubara mode.
RegimeResult high_temperature_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                     RegimePolicy policy = RegimePolicy::enforce,
                                     const UnitSystem& units = si_units());

/// -(alpha0 / 4 d^3) (hbar omega_a / 2 + hbar omega_a / (e^{hbar omega_a / k_B T} - 1)).
RegimeResult short_distance_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                   RegimePolicy policy = RegimePolicy::enforce,
                                   const UnitSystem& units = si_units());

struct ValueAndDerivative {
  double value = 0.0;
  double derivative = 0.0;
};

/// eta0(0+) = 1.
inline constexpr double eta0_at_zero = 1.0;
/// eta1(0+) = -5/3 + 2/5 - 2/9.
inline constexpr double eta1_at_zero = -67.0 / 45.0;

double eta0(double tau);
ValueAndDerivative eta0_with_derivative(double tau);

double eta1(double tau, const SeriesControl& ctrl = {});
ValueAndDerivative eta1_with_derivative(double tau, const SeriesControl& ctrl = {});

}  // namespace cpshell::asymptotics
