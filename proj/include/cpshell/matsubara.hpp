#pragma once

// Free energy of the atom as the Matsubara double sum
//
//   F = -(2 k_B T Omega / (R + d)^2) sum_l nu sum'_n alpha(i xi_n) g_l(x_n),
//
// x_n = n T/T_R, the n = 0 term carrying weight 1/2. The n = 0 term is taken
// from its closed form; the reduced functions return F in units of
// k_B T_R alpha0 / R^3.

#include <cstdint>

#include "cpshell/model.hpp"

namespace cpshell::matsubara {

struct SeriesControl {
  double rel_tol = 1e-8;
  double abs_floor = 0.0;  // J; series stop once their remainder is below this
  int l_max_cap = 5000;
  std::int64_t n_max_cap = 1'000'000;
  int threads = 0;  // 0: CPSHELL_THREADS or the hardware concurrency
};

/// Throws DomainError unless 0 < rel_tol < 1 and the caps are positive.
void validate(const SeriesControl& ctrl);

/// Worker count resolved from ctrl.threads and the CPSHELL_THREADS variable.
int resolve_threads(const SeriesControl& ctrl);

struct ModeTerm {
  int l = 0;
  std::int64_t n = 0;
  double te = 0.0;
  double tm = 0.0;
  double x = 0.0;
  double z = 0.0;
};

struct EnergyBreakdown {
  double total = 0.0;
  double zero_mode = 0.0;
  double te_share = 0.0;
  double tm_share = 0.0;  // includes the zero mode
  int l_max_used = 0;
  std::int64_t n_max_used = 0;
  double truncation_bound = 0.0;
};

double jost_te(int l, double x, double Q);
double jost_tm(int l, double x, double Q);

/// g_l at the n-th Matsubara frequency, n >= 1.
ModeTerm mode_term(int l, std::int64_t n, const model::DimensionlessPoint& point);

/// P(r) / (2 r^3 (r+1)^4 (r+2)^3), P = 6r^4 + 24r^3 + 33r^2 + 18r + 4, so that
/// the zero mode is -k_B T alpha0 / R^3 times this.
double zero_mode_coefficient(double r);

/// The same coefficient from the numerically summed l-series of the x -> 0
/// limit of Q g_l(x), extrapolated from two small x.
double zero_mode_series(double r, const SeriesControl& ctrl);

/// Zero-mode free energy in J.
double zero_mode(const model::DimensionlessPoint& point, double alpha0, double T, double R,
                 const UnitSystem& units = si_units());

/// All fields in units of k_B T_R alpha0 / R^3.
EnergyBreakdown free_energy_reduced(const model::DimensionlessPoint& point, model::PolarizabilityMode mode,
                                    const SeriesControl& ctrl);

EnergyBreakdown free_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const SeriesControl& ctrl, const UnitSystem& units = si_units());

}  // namespace cpshell::matsubara
