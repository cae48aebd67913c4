// Acceptance gate: one PASS/FAIL line per criterion.
//
//   cpshell_acceptance [--known-failure N]... [--only N]...
//
// Exit status is 0 iff every criterion passes, except those named with
// --known-failure, which must fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cpshell/abel_plana.hpp"
#include "cpshell/asymptotics.hpp"
#include "cpshell/cli.hpp"
#include "cpshell/entropy.hpp"
#include "cpshell/errors.hpp"
#include "cpshell/matsubara.hpp"
#include "cpshell/numerics.hpp"
#include "cpshell/specfun.hpp"

using namespace cpshell;
using model::PolarizabilityMode;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string summary;  // measured values against tolerances
};

model::PhysicalSystem c60(double r, double T, double Q = 0.0494) {
  model::PhysicalSystem s = model::c60_hydrogen();
  s.separation_d = r * s.radius_R;
  s.plasma_Omega = Q / s.radius_R;
  s.temperature_T = T;
  return s;
}

model::Polarizability dynamic(const model::PhysicalSystem& s) {
  return model::polarizability_of(s, PolarizabilityMode::single_oscillator);
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, i / double(n - 1));
  return g;
}

const double kGridR[] = {0.5, 1.0, 2.0};
const double kGridT[] = {30.0, 300.0, 3000.0};
const double kGridQ[] = {0.0494, 0.5, 5.0};

Outcome criterion_1() {
  double worst = 0.0;
  for (double r : kGridR) {
    for (double T : kGridT) {
      for (double Q : kGridQ) {
        const model::PhysicalSystem s = c60(r, T, Q);
        const matsubara::SeriesControl ctrl{.rel_tol = 1e-10};
        const double m = matsubara::free_energy(s, dynamic(s), ctrl).total;
        const double a = abel_plana::free_energy(s, dynamic(s), ctrl).total;
        worst = std::max(worst, rel(a, m));
      }
    }
  }
  return {worst <= 1e-6, "max rel diff " + num(worst) + " (tol 1e-6) over 27 points"};
}

Outcome criterion_2() {
  const model::PhysicalSystem s = cli::preset("c60-hydrogen").system;
  const model::EffectiveTemperatures t = model::effective_temperatures(s);
  const model::DimensionlessPoint p = model::reduce(s);
  const double errs[] = {rel(t.T_omega, 2.15e4), rel(t.T_R, 1.06e6), rel(p.Q, 4.94e-2), rel(p.q_a, 0.0202)};
  const double worst = *std::max_element(std::begin(errs), std::end(errs));
  return {worst <= 1e-2, "T_omega " + num(t.T_omega) + " K, T_R " + num(t.T_R) + " K, Q " + num(p.Q) + ", q_a " +
                             num(p.q_a) + "; max rel dev " + num(worst) + " (tol 1e-2)"};
}

// ln|F - E0| against ln T from the thermal corrections, which equal F - E0 exactly.
Outcome criterion_3() {
  const double r = 0.5;
  std::vector<double> lx;
  std::vector<double> ly;
  std::vector<double> ratios;
  for (double T : log_grid(10.0, 100.0, 7)) {
    const model::PhysicalSystem s = c60(r, T);
    const model::DimensionlessPoint p = model::reduce(s);
    const matsubara::SeriesControl ctrl{.rel_tol = 1e-10};
    const double unit = model::energy_unit(s);
    const double thermal = unit * (abel_plana::thermal_correction_1_reduced(p, ctrl) +
                                   abel_plana::thermal_correction_2_reduced(p, ctrl));
    const double kT = codata::boltzmann * T;
    const double hc = codata::hbar * codata::speed_of_light;
    const double law = -(4.0 * kPi * kPi * kPi / 15.0) * s.alpha0 / std::pow(1.0 + r, 6) * std::pow(kT, 4) / (hc * hc * hc);
    lx.push_back(std::log(T));
    ly.push_back(std::log(-thermal));
    ratios.push_back(thermal / law);
  }
  const LineFit fit = least_squares(lx, ly);
  double coefficient_dev = 0.0;
  for (double q : ratios) coefficient_dev = std::max(coefficient_dev, std::fabs(q - 1.0));
  const bool pass = std::fabs(fit.slope - 4.0) <= 0.02 && coefficient_dev <= 1e-2;
  return {pass, "exponent " + num(fit.slope) + " (4 +- 0.02), coefficient max rel dev " + num(coefficient_dev) +
                    " (tol 1e-2)"};
}

Outcome criterion_4() {
  model::PhysicalSystem s = c60(0.5, 0.0);
  s.temperature_T = 100.0 * model::effective_temperatures(s).T_omega;
  const matsubara::EnergyBreakdown b = matsubara::free_energy(s, dynamic(s), {.rel_tol = 1e-10});
  const double high = std::fabs(b.total / b.zero_mode - 1.0);
  double series = 0.0;
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    series = std::max(series, rel(matsubara::zero_mode_series(r, {.rel_tol = 1e-12}), matsubara::zero_mode_coefficient(r)));
  }
  return {high <= 1e-3 && series <= 1e-9,
          "|F/zero_mode - 1| " + num(high) + " (tol 1e-3), series vs closed form " + num(series) + " (tol 1e-9)"};
}

Outcome criterion_5() {
  const double r = 0.02;
  const double Q = 0.5;
  double worst = 0.0;
  std::string detail;
  for (double T : {0.0, 300.0, 1e5}) {
    const model::PhysicalSystem s = c60(r, T, Q);
    const matsubara::SeriesControl ctrl{.rel_tol = 1e-8};
    double full = 0.0;
    if (T == 0.0) {
      full = abel_plana::zero_temperature_energy(s, dynamic(s), ctrl);
    } else if (T < 1e4) {
      full = abel_plana::free_energy(s, dynamic(s), ctrl).total;
    } else {
      full = matsubara::free_energy(s, dynamic(s), ctrl).total;
    }
    const double law = asymptotics::short_distance_energy(s, dynamic(s), asymptotics::RegimePolicy::report).value;
    const double dev = rel(full, law);
    worst = std::max(worst, dev);
    detail += "T=" + num(T) + ": " + num(dev) + "; ";
  }
  // Analytic reductions of the short-distance law.
  model::PhysicalSystem s = c60(r, 0.0, Q);
  const double d3 = std::pow(s.separation_d, 3);
  const double vacuum = -codata::hbar * s.atom_omega_a * s.alpha0 / (8.0 * d3);
  const double cold = rel(asymptotics::short_distance_energy(s, dynamic(s)).value, vacuum);
  s.temperature_T = 1e6 * codata::hbar * s.atom_omega_a / codata::boltzmann;
  const double classical = -codata::boltzmann * s.temperature_T * s.alpha0 / (4.0 * d3);
  const double hot = rel(asymptotics::short_distance_energy(s, dynamic(s)).value, classical);
  const bool pass = worst <= 5e-2 && cold <= 1e-14 && hot <= 1e-6;
  return {pass, detail + "max " + num(worst) + " (tol 5e-2); T->0 " + num(cold) + ", T->inf " + num(hot)};
}

// Fixed d = 0.171 nm, tau = 1, static polarizability, R = d / r.
struct PlateResiduals {
  LineFit fit;
  std::string detail;
};

PlateResiduals plate_residuals(double Q) {
  const double d = 0.171e-9;
  const double tau = 1.0;
  std::vector<double> lx;
  std::vector<double> ly;
  PlateResiduals out;
  for (double r : {0.1, 0.05, 0.02}) {
    model::PhysicalSystem s = model::c60_hydrogen();
    s.separation_d = d;
    s.radius_R = d / r;
    s.plasma_Omega = Q / s.radius_R;
    s.temperature_T = tau * codata::hbar * codata::speed_of_light / (4.0 * kPi * codata::boltzmann * d);
    const model::Polarizability pol = model::polarizability_of(s, PolarizabilityMode::static_alpha);
    const matsubara::SeriesControl ctrl{.rel_tol = 1e-10};
    const double m = matsubara::free_energy(s, pol, ctrl).total;
    const double plate = asymptotics::flat_plate_energy(s, pol, ctrl, true);
    const double residual = std::fabs(m - plate);
    lx.push_back(std::log(r));
    ly.push_back(std::log(residual));
    out.detail += "r=" + num(r) + ": |M - flat|/|flat| " + num(residual / std::fabs(plate)) + "; ";
  }
  out.fit = least_squares(lx, ly);
  return out;
}

Outcome criterion_6() {
  const PlateResiduals plasma = plate_residuals(1e3);
  // Diagnostic only: near-ideal conductor, where plasma corrections no longer mask the O(r) residual.
  const PlateResiduals ideal = plate_residuals(1e8);
  return {std::fabs(plasma.fit.slope - 2.0) <= 0.3,
          plasma.detail + "log-log slope " + num(plasma.fit.slope) + " (2 +- 0.3); diagnostic: slope at Q=1e8 is " +
              num(ideal.fit.slope)};
}

Outcome criterion_7() {
  double worst = 0.0;
  for (double r : kGridR) {
    for (double T : kGridT) {
      for (double Q : kGridQ) {
        const model::PhysicalSystem s = c60(r, T, Q);
        const double a = entropy::entropy_analytic(s, dynamic(s), {}).total;
        const double f = entropy::entropy_fd(s, dynamic(s), {}).total;
        worst = std::max(worst, rel(a, f));
      }
    }
  }
  const double r = 0.5;
  std::vector<double> lx;
  std::vector<double> ly;
  double coefficient_dev = 0.0;
  for (double T : log_grid(10.0, 100.0, 5)) {
    const model::PhysicalSystem s = c60(r, T);
    const double S = entropy::entropy_analytic(s, dynamic(s), {}).total;
    lx.push_back(std::log(T));
    ly.push_back(std::log(S));
    coefficient_dev = std::max(coefficient_dev, std::fabs(S / entropy::low_temperature_entropy(s) - 1.0));
  }
  const LineFit fit = least_squares(lx, ly);
  model::PhysicalSystem hot = c60(r, 0.0);
  hot.temperature_T = 100.0 * model::effective_temperatures(hot).T_omega;
  const double S_hot = entropy::entropy_fd(hot, dynamic(hot), {}).total;
  const double high =
      rel(S_hot, model::entropy_unit(hot) * entropy::high_temperature_entropy_coefficient(r));
  const bool pass = worst <= 1e-4 && std::fabs(fit.slope - 3.0) <= 0.05 && coefficient_dev <= 2e-2 && high <= 1e-3;
  return {pass, "routes max rel diff " + num(worst) + " (tol 1e-4); low-T exponent " + num(fit.slope) +
                    " (3 +- 0.05), coefficient dev " + num(coefficient_dev) + " (tol 2e-2); high-T dev " + num(high) +
                    " (tol 1e-3)"};
}

Outcome criterion_8() {
  const double r_star = entropy::find_sign_change_threshold({1e-3, 20.0}, 1e-4);
  const double min0 = entropy::sigma_minimum(0.0, 1e-3, 20.0).sigma;
  const double min01 = entropy::sigma_minimum(0.1, 1e-3, 20.0).sigma;
  const bool pass = std::fabs(r_star - 0.085) <= 0.005 && min0 < 0.0 && min01 >= 0.0;
  return {pass, "r* " + num(r_star) + " (0.085 +- 0.005), min sigma(r=0) " + num(min0) + ", min sigma(r=0.1) " +
                    num(min01)};
}

Outcome criterion_9() {
  bool pass = true;
  std::string detail;

  const model::PhysicalSystem vacuum = c60(0.5, 300.0, 0.0);
  const bool zero = matsubara::free_energy(vacuum, dynamic(vacuum), {}).total == 0.0 &&
                    abel_plana::free_energy(vacuum, dynamic(vacuum), {}).total == 0.0;
  pass = pass && zero;
  detail += std::string("Q=0 exact zero ") + (zero ? "yes" : "no");

  bool negative = true;
  for (double r : kGridR) {
    for (double T : kGridT) {
      for (double Q : kGridQ) {
        const model::PhysicalSystem s = c60(r, T, Q);
        negative = negative && matsubara::free_energy(s, dynamic(s), {}).total < 0.0;
      }
    }
  }
  pass = pass && negative;
  detail += std::string("; F<0 on grid ") + (negative ? "yes" : "no");

  double jost_min = INFINITY;
  for (int l = 1; l <= 60; ++l) {
    for (double x : log_grid(1e-3, 50.0, 12)) {
      for (double Q : kGridQ) {
        jost_min = std::min({jost_min, matsubara::jost_te(l, x, Q), matsubara::jost_tm(l, x, Q)});
      }
    }
  }
  pass = pass && jost_min >= 1.0;
  detail += "; min Jost " + num(jost_min);

  double wronskian = 0.0;
  for (int l = 1; l <= 1000; l = l < 60 ? l + 1 : l * 2) {
    for (double x : log_grid(1e-3, 50.0, 12)) {
      const specfun::BesselOrder order(l);
      wronskian = std::max(wronskian, std::fabs(specfun::riccati_ik(order, x).wronskian() + 1.0));
      wronskian = std::max(wronskian, std::fabs(specfun::riccati_jy(order, x).wronskian() - 1.0));
    }
  }
  pass = pass && wronskian <= 1e-10;
  detail += "; max Wronskian dev " + num(wronskian);

  // F(T2) - F(T1) from the Matsubara sum against the integral of the analytic entropy.
  const double Tw = model::effective_temperatures(c60(0.5, 300.0)).T_omega;
  const double T1 = 0.2 * Tw;
  const double T2 = Tw;
  const auto F = [](double T) {
    const model::PhysicalSystem s = c60(0.5, T);
    return matsubara::free_energy(s, dynamic(s), {.rel_tol = 1e-12}).total;
  };
  const auto S = [](double T) {
    const model::PhysicalSystem s = c60(0.5, T);
    return entropy::entropy_analytic(s, dynamic(s), {.rel_tol = 1e-10}).total;
  };
  const double dF = F(T2) - F(T1);
  const double integral = numerics::integrate_gk(S, T1, T2, 1e-8, 4).value;
  const double consistency = rel(-integral, dF);
  pass = pass && consistency <= 1e-4;
  detail += "; thermodynamic consistency " + num(consistency) + " (tol 1e-4)";
  return {pass, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_10() {
  boost::property_tree::ptree tree;
  tree.put("system.preset", "c60-hydrogen");
  const cli::VerifyReport report = cli::verify(cli::parse_config(tree));

  tree.put("outputs.include", "free_energy,breakdown,entropy,regimes");
  tree.put("sweep.variable", "T");
  tree.put("sweep.min", "30");
  tree.put("sweep.max", "3000");
  tree.put("sweep.count", "5");
  tree.put("sweep.spacing", "log");
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "cpshell_acceptance";
  std::filesystem::create_directories(dir);
  bool identical = true;
  for (const char* format : {"csv", "json"}) {
    std::string outputs[2];
    for (int i = 0; i < 2; ++i) {
      tree.put("output.format", format);
      tree.put("output.path", (dir / ("run" + std::to_string(i) + "." + format)).string());
      std::ostringstream sink;
      cli::run(cli::parse_config(tree), sink);
      outputs[i] = slurp(dir / ("run" + std::to_string(i) + "." + format));
    }
    identical = identical && !outputs[0].empty() && outputs[0] == outputs[1];
  }
  std::filesystem::remove_all(dir);
  return {report.passed() && identical, std::string("verify ") + (report.passed() ? "passed" : "failed") +
                                            ", repeated runs " + (identical ? "byte-identical" : "differ")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_failures;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--known-failure" || arg == "--only") && i + 1 < argc) {
      (arg == "--only" ? only : known_failures).insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure N]... [--only N]...\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "representation_equivalence", criterion_1},
      {2, "parameter_reproduction", criterion_2},
      {3, "low_temperature_law", criterion_3},
      {4, "high_temperature_law", criterion_4},
      {5, "short_distance_law", criterion_5},
      {6, "flat_plate_limit", criterion_6},
      {7, "entropy_routes", criterion_7},
      {8, "sign_change_threshold", criterion_8},
      {9, "renormalization_and_positivity", criterion_9},
      {10, "determinism", criterion_10},
  };

  int unexpected = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool known = known_failures.contains(c.id);
    std::printf("%s %d %s: %s [%.1f s]%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str(), seconds,
                known ? (o.pass ? " (listed as a known failure but passed)" : " (known failure)") : "");
    std::fflush(stdout);
    if (o.pass == known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
