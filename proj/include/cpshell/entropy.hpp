#pragma once

// Entropy S = -dF/dT. The analytic route differentiates the thermal
// corrections under the integral,
//
//   S1 = k_B (alpha0/R^3) (e1/chi^2) (pi a / sinh pi a)^2
//   S2 = k_B (alpha0/(pi R^3 chi^2)) int_0^inf {t de2/dt + e2 (1 - 2 pi a t coth pi a t)}
//        ln|(1+t)/(1-t)| (pi a / sinh pi a t)^2 dt,
//
// with e2 = e2(q_a t). The finite-difference route differentiates a free
// energy numerically. For a large sphere with static polarizability the
// entropy is (3 k_B alpha0 / 2 d^3) sigma with sigma = eta0' + r eta1'.

#include <optional>
#include <utility>
#include <vector>

#include "cpshell/matsubara.hpp"

namespace cpshell::entropy {

using matsubara::SeriesControl;

enum class Route { analytic, finite_difference };

struct EntropyBreakdown {
  std::optional<double> s1;  // J/K; absent when the route gives only the total
  std::optional<double> s2;
  double total = 0.0;
  Route route = Route::analytic;
};

/// S1 + S2 from e1 and e2; single-oscillator polarizability, T > 0.
EntropyBreakdown entropy_analytic(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                                  const SeriesControl& ctrl, const UnitSystem& units = si_units());

/// Free energy the finite-difference route differentiates. abel_plana_thermal
/// uses F1 + F2 (E0 does not depend on T) and also yields s1, s2 separately;
/// matsubara uses the full double sum. automatic picks matsubara when its
/// n-sum is short or the polarizability is static, abel_plana_thermal otherwise.
enum class FdSource { automatic, abel_plana_thermal, matsubara };

/// Richardson-extrapolated central differences with initial step T/50.
/// Throws PrecisionError when the tableau is noisy.
EntropyBreakdown entropy_fd(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const SeriesControl& ctrl, FdSource source = FdSource::automatic,
                            const UnitSystem& units = si_units());

/// P(r) / (2 r^3 (r+1)^4 (r+2)^3): the high-temperature entropy in units of k_B alpha0 / R^3.
double high_temperature_entropy_coefficient(double r);

/// (16 pi^3 / 15) k_B alpha0 (k_B T / hbar c)^3 / (1+r)^6.
double low_temperature_entropy(const model::PhysicalSystem& sys, const UnitSystem& units = si_units());

struct SigmaCurve {
  double r = 0.0;
  std::vector<double> tau_grid;
  std::vector<double> sigma_values;
  // First and last grid tau with sigma < 0, present iff sigma changes sign on the grid.
  std::optional<std::pair<double, double>> sign_change;
};

double sigma(double r, double tau, const SeriesControl& ctrl = {});

SigmaCurve sigma_curve(double r, const std::vector<double>& tau_grid, const SeriesControl& ctrl = {});

struct SigmaMinimum {
  double tau = 0.0;
  double sigma = 0.0;
};

/// Minimum of sigma(r, .) over [tau_min, tau_max]: log grid then Brent refinement.
SigmaMinimum sigma_minimum(double r, double tau_min, double tau_max, const SeriesControl& ctrl = {});

/// Smallest r for which sigma >= 0 on the whole tau range, by bisection of
/// r in [r_low, r_high] to the given absolute tolerance. Throws SearchError
/// unless min sigma is negative at r_low and non-negative at r_high.
double find_sign_change_threshold(std::pair<double, double> tau_range, double tolerance,
                                  const SeriesControl& ctrl = {}, double r_low = 0.0, double r_high = 0.5);

}  // namespace cpshell::entropy
