#pragma once

// The free energy split by the Abel-Plana formula into a temperature
// independent part and two thermal corrections,
//
//   F = E0 + F1 + F2,
//   E0 = -(2 q_a^2 / chi^2) int_0^inf e0(x) / (x^2 + q_a^2) dx
//   F1 = -2 pi q_a e1 / (chi^2 (e^{2 pi a} - 1))
//   F2 = -(2 q_a / chi^2) int_0^inf d/dt[e2(q_a t) / (e^{2 pi a t} - 1)] ln|(1+t)/(1-t)| dt
//
// with e0(x) = Q sum nu g_l(x), e1 = Re e0(i q_a), e2(u) = Im e0(iu), in units
// of k_B T_R alpha0 / R^3. Only the single-oscillator polarizability has this
// form; the static one raises DomainError.

#include <complex>
#include <functional>

#include "cpshell/matsubara.hpp"
#include "cpshell/modes.hpp"

namespace cpshell::abel_plana {

using matsubara::SeriesControl;

struct AbelPlanaBreakdown {
  double E0 = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
  double total = 0.0;
};

/// g_l(+iu) at u = t T/T_R, the continuation of the Matsubara index n -> it.
std::complex<double> g_continued(int l, double t, const model::DimensionlessPoint& point);

/// e0(x) on the real axis, split into TE and TM.
modes::Sum e0_at(double x, const model::DimensionlessPoint& point, const SeriesControl& ctrl);

/// e0(+iu): real part e1-type, imaginary part e2-type, split into TE and TM.
modes::ComplexSum e0_continued(double u, const model::DimensionlessPoint& point, const SeriesControl& ctrl);

/// e1 = Re e0(i q_a).
double e1(const model::DimensionlessPoint& point, const SeriesControl& ctrl);

/// e2(u) = Im e0(iu); 0 below the underflow threshold of its u^3 law.
double e2(double u, const model::DimensionlessPoint& point, const SeriesControl& ctrl);

struct ValueAndSlope {
  double value = 0.0;
  double slope = 0.0;
};

/// e2(u) and de2/du; the slope from Richardson-extrapolated central differences.
ValueAndSlope e2_with_slope(double u, const model::DimensionlessPoint& point, const SeriesControl& ctrl);

/// Integrates f over t in [0, inf) for a kernel with Planck decay
/// e^{-2 pi a t} and a logarithmic singularity at t = 1. f receives t and
/// |1 - t| computed without cancellation.
double integrate_thermal_kernel(const std::function<double(double, double)>& f, double a, double rel_tol);

/// Throws SingularityError when the thermal integration path u = q_a t,
/// t up to the Planck cut, crosses a shell resonance (see
/// modes::first_jost_sign_change); adaptive quadrature cannot resolve them.
void require_resonance_free(const model::DimensionlessPoint& point, const SeriesControl& ctrl);

/// ln|(1+t)/(1-t)| given t and |1 - t|.
double log_kernel(double t, double one_minus_t_abs);

double zero_temperature_energy_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl);
double thermal_correction_1_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl);
double thermal_correction_2_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl);
AbelPlanaBreakdown free_energy_reduced(const model::DimensionlessPoint& point, const SeriesControl& ctrl);

double zero_temperature_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                               const SeriesControl& ctrl, const UnitSystem& units = si_units());
double thermal_correction_1(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const UnitSystem& units = si_units());
double thermal_correction_2(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const SeriesControl& ctrl, const UnitSystem& units = si_units());
AbelPlanaBreakdown free_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                               const SeriesControl& ctrl, const UnitSystem& units = si_units());

}  // namespace cpshell::abel_plana
