#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpshell/abel_plana.hpp"
#include "cpshell/asymptotics.hpp"
#include "cpshell/errors.hpp"
#include "oracle_values.hpp"

using namespace cpshell;
using model::PolarizabilityMode;

namespace {

model::PhysicalSystem c60(double r, double T) {
  model::PhysicalSystem s = model::c60_hydrogen();
  s.separation_d = r * s.radius_R;
  s.temperature_T = T;
  return s;
}

// Huge sphere with a good conductor: the flat-plate limit at d = r R.
model::PhysicalSystem plate(double r, double tau, double Q = 1e6) {
  model::PhysicalSystem s = model::c60_hydrogen();
  s.radius_R = 1e-6;
  s.plasma_Omega = Q / s.radius_R;
  s.separation_d = r * s.radius_R;
  s.temperature_T = tau * codata::hbar * codata::speed_of_light / (4.0 * std::numbers::pi * codata::boltzmann *
                                                                   s.separation_d);
  return s;
}

model::Polarizability pol(const model::PhysicalSystem& s, PolarizabilityMode m = PolarizabilityMode::single_oscillator) {
  return model::polarizability_of(s, m);
}

}  // namespace

TEST_CASE("casimir_polder_energy scales as d^-4 and vanishes with alpha0") {
  const double e = asymptotics::casimir_polder_energy(1e-30, 1e-9);
  CHECK(e < 0.0);
  CHECK(asymptotics::casimir_polder_energy(1e-30, 2e-9) == doctest::Approx(e / 16.0).epsilon(1e-15));
  CHECK(asymptotics::casimir_polder_energy(0.0, 1e-9) == 0.0);
  CHECK_THROWS_AS(asymptotics::casimir_polder_energy(1e-30, 0.0), DomainError);
}

TEST_CASE("eta0 and eta1 agree with the oracle") {
  for (const auto& row : oracle::kEta) {
    CAPTURE(row.tau);
    const auto e0 = asymptotics::eta0_with_derivative(row.tau);
    const auto e1 = asymptotics::eta1_with_derivative(row.tau, {.rel_tol = 1e-12});
    CHECK(e0.value == doctest::Approx(row.eta0).epsilon(1e-12));
    CHECK(e1.value == doctest::Approx(row.eta1).epsilon(1e-10));
    CHECK(std::fabs(e0.derivative - row.eta0_prime) <= 1e-10 * std::max(1.0, std::fabs(row.eta0_prime)));
    CHECK(std::fabs(e1.derivative - row.eta1_prime) <= 1e-10 * std::max(1.0, std::fabs(row.eta1_prime)));
  }
}

TEST_CASE("eta limits") {
  CHECK(asymptotics::eta0(1e-3) == doctest::Approx(asymptotics::eta0_at_zero).epsilon(1e-12));
  CHECK(asymptotics::eta1(1e-3) == doctest::Approx(asymptotics::eta1_at_zero).epsilon(1e-8));
  CHECK(asymptotics::eta0(30.0) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(asymptotics::eta1(30.0) == doctest::Approx(-5.0).epsilon(1e-6));
}

TEST_CASE("eta0 dips below one before its linear rise") {
  // eta0' < 0 at small tau is what makes the r = 0 entropy negative.
  CHECK(asymptotics::eta0_with_derivative(1.0).derivative < 0.0);
  CHECK(asymptotics::eta0_with_derivative(3.0).derivative > 0.0);
  double previous = asymptotics::eta0(3.0);
  for (double tau = 3.5; tau <= 20.0; tau += 0.5) {
    const double v = asymptotics::eta0(tau);
    CHECK(v > previous);
    previous = v;
  }
}

TEST_CASE("eta derivatives match central differences") {
  for (double tau : {0.3, 2.0, 7.0}) {
    CAPTURE(tau);
    const double h = 1e-4 * tau;
    const double fd0 = (asymptotics::eta0(tau + h) - asymptotics::eta0(tau - h)) / (2.0 * h);
    const double fd1 = (asymptotics::eta1(tau + h, {.rel_tol = 1e-13}) - asymptotics::eta1(tau - h, {.rel_tol = 1e-13})) /
                       (2.0 * h);
    CHECK(std::fabs(asymptotics::eta0_with_derivative(tau).derivative - fd0) <= 1e-8);
    CHECK(std::fabs(asymptotics::eta1_with_derivative(tau, {.rel_tol = 1e-13}).derivative - fd1) <= 1e-8);
  }
}

TEST_CASE("flat plate, static polarizability: leading term is E_CP eta0") {
  for (double tau : {0.1, 1.0, 10.0}) {
    CAPTURE(tau);
    const model::PhysicalSystem s = plate(1e-3, tau);
    const double e_cp = asymptotics::casimir_polder_energy(s.alpha0, s.separation_d);
    const double leading = asymptotics::flat_plate_energy(s, pol(s, PolarizabilityMode::static_alpha), {}, false);
    CHECK(leading == doctest::Approx(e_cp * asymptotics::eta0(tau)).epsilon(1e-8));
    const double corrected = asymptotics::flat_plate_energy(s, pol(s, PolarizabilityMode::static_alpha), {}, true);
    CHECK(corrected == doctest::Approx(e_cp * (asymptotics::eta0(tau) + 1e-3 * asymptotics::eta1(tau))).epsilon(1e-8));
  }
}

TEST_CASE("flat plate: corrections vanish for R -> infinity") {
  const model::PhysicalSystem s = plate(1e-7, 1.0);
  const double with = asymptotics::flat_plate_energy(s, pol(s), {}, true);
  const double without = asymptotics::flat_plate_energy(s, pol(s), {}, false);
  CHECK(with == doctest::Approx(without).epsilon(1e-6));
}

TEST_CASE("flat plate: high-temperature leading term is the classical zero mode") {
  const model::PhysicalSystem s = plate(1e-3, 40.0);
  const double classical = -codata::boltzmann * s.temperature_T * s.alpha0 / (4.0 * std::pow(s.separation_d, 3));
  CHECK(asymptotics::flat_plate_energy(s, pol(s, PolarizabilityMode::static_alpha), {}, false) ==
        doctest::Approx(classical).epsilon(1e-12));
}

TEST_CASE("low-temperature regime for C60 at 300 K") {
  const model::PhysicalSystem s = c60(0.5, 300.0);
  const asymptotics::RegimeResult low = asymptotics::low_temperature_energy(s, pol(s));
  CHECK(low.valid());
  CHECK(low.worst_slack() < 1.0);
  const double exact = abel_plana::free_energy(s, pol(s), {.rel_tol = 1e-10}).total;
  CHECK(low.value == doctest::Approx(exact).epsilon(1e-6));
  CHECK(asymptotics::low_temperature_coefficient(1.0) == doctest::Approx(2.0 / (45.0 * 64.0)).epsilon(1e-15));
}

TEST_CASE("Matsubara sum agrees with the low-temperature regime") {
  for (double T : {30.0, 300.0}) {
    CAPTURE(T);
    const model::PhysicalSystem s = c60(0.5, T);
    const double low = asymptotics::low_temperature_energy(s, pol(s)).value;
    CHECK(matsubara::free_energy(s, pol(s), {}).total == doctest::Approx(low).epsilon(1e-2));
  }
}

TEST_CASE("regime policies") {
  const model::PhysicalSystem hot = c60(0.5, 1e6);
  CHECK_THROWS_AS(asymptotics::low_temperature_energy(hot, pol(hot)), RegimeError);
  const asymptotics::RegimeResult r =
      asymptotics::low_temperature_energy(c60(0.5, 3e4), pol(hot), {}, asymptotics::RegimePolicy::report);
  CHECK_FALSE(r.valid());
  CHECK(r.worst_slack() >= 1.0);
  const model::PhysicalSystem cold = c60(0.5, 300.0);
  CHECK_THROWS_AS(asymptotics::high_temperature_energy(cold, pol(cold)), RegimeError);
}

TEST_CASE("high-temperature regime is the zero mode") {
  model::PhysicalSystem s = c60(0.5, 0.0);
  s.temperature_T = 1e3 * model::effective_temperatures(s).T_omega;
  const asymptotics::RegimeResult high = asymptotics::high_temperature_energy(s, pol(s));
  CHECK(high.valid());
  CHECK(high.value == matsubara::zero_mode(model::reduce(s), s.alpha0, s.temperature_T, s.radius_R));
}

TEST_CASE("high_temperature_coefficient") {
  CHECK(asymptotics::high_temperature_coefficient(1.0) == doctest::Approx(170.0 / 1296.0).epsilon(1e-15));
  for (double r : {0.1, 0.7, 4.0}) {
    CHECK(asymptotics::high_temperature_coefficient(r) ==
          doctest::Approx(4.0 / 3.0 * std::pow(r, 4) * matsubara::zero_mode_coefficient(r)).epsilon(1e-14));
  }
}

TEST_CASE("short-distance regime interpolates between vacuum and classical limits") {
  model::PhysicalSystem s = c60(0.01, 0.0);
  s.plasma_Omega = 5.0 / s.radius_R;
  const double quantum = codata::hbar * s.atom_omega_a;
  const double base = -s.alpha0 / (4.0 * std::pow(s.separation_d, 3));
  CHECK(asymptotics::short_distance_energy(s, pol(s)).value == doctest::Approx(base * quantum / 2.0).epsilon(1e-15));
  s.temperature_T = quantum / codata::boltzmann;
  CHECK(asymptotics::short_distance_energy(s, pol(s)).value ==
        doctest::Approx(base * quantum * (0.5 + 1.0 / (std::numbers::e - 1.0))).epsilon(1e-14));
  s.temperature_T = 1e4 * quantum / codata::boltzmann;
  CHECK(asymptotics::short_distance_energy(s, pol(s)).value ==
        doctest::Approx(base * codata::boltzmann * s.temperature_T).epsilon(1e-8));
}

TEST_CASE("regime names") {
  CHECK(asymptotics::to_string(asymptotics::Regime::low_T) == "low_T");
  CHECK(asymptotics::to_string(asymptotics::Regime::flat_plate) == "flat_plate");
}
