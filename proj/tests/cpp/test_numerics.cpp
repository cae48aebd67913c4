#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpshell/numerics.hpp"

using namespace cpshell;

TEST_CASE("CompensatedSum recovers digits lost by naive summation") {
  numerics::CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-10));
}

TEST_CASE("richardson_derivative of smooth functions") {
  const auto d = numerics::richardson_derivative([](double x) { return std::exp(x); }, 1.0, 0.1);
  CHECK(d.value == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  const auto p = numerics::richardson_derivative([](double x) { return x * x * x; }, 2.0, 0.5);
  CHECK(p.value == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("integrate_gk on a polynomial and an oscillatory integrand") {
  CHECK(numerics::integrate_gk([](double x) { return x * x; }, 0.0, 3.0, 1e-12).value ==
        doctest::Approx(9.0).epsilon(1e-13));
  CHECK(numerics::integrate_gk([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12).value ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("integrate_tanh_sinh handles endpoint singularities") {
  // int_0^1 ln x dx = -1
  const auto r = numerics::integrate_tanh_sinh([](double x, double) { return std::log(x); }, 0.0, 1.0, 1e-12);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-11));
}

TEST_CASE("integrate_exp_sinh: Bose moment") {
  // int_0^inf t^3 / (e^{2 pi t} - 1) dt = 1/240
  const auto r = numerics::integrate_exp_sinh(
      [](double t) { return t > 0.0 && t < 50.0 ? t * t * t * numerics::planck_occupation(2.0 * std::numbers::pi * t) : 0.0; }, 0.0, 1e-12);
  CHECK(r.value == doctest::Approx(1.0 / 240.0).epsilon(1e-11));
}

TEST_CASE("integrate_piecewise sums the pieces") {
  const auto r = numerics::integrate_piecewise([](double x) { return std::fabs(x - 1.0); }, {0.0, 1.0, 3.0}, 1e-12);
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("log_sinh stays finite for large arguments") {
  CHECK(numerics::log_sinh(0.5) == doctest::Approx(std::log(std::sinh(0.5))).epsilon(1e-15));
  CHECK(numerics::log_sinh(1000.0) == doctest::Approx(1000.0 - std::log(2.0)).epsilon(1e-15));
}
