#include "cpshell/matsubara.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "cpshell/errors.hpp"
#include "cpshell/modes.hpp"
#include "cpshell/numerics.hpp"

namespace cpshell::matsubara {

namespace {

constexpr std::int64_t kBlock = 64;
constexpr int kQuietRun = 3;

struct NTerm {
  double te = 0.0;
  double tm = 0.0;
  double l_tail = 0.0;
  int l_used = 0;
  std::exception_ptr error;
};

// Evaluates the weighted mode sums for n in [first, first + count), split
// into contiguous chunks over the worker threads. Failures are stored per
// term and only raised once the sequential scan reaches that n.
void evaluate_wave(std::int64_t first, std::int64_t count, const model::DimensionlessPoint& point,
                   model::PolarizabilityMode mode, const SeriesControl& ctrl, int threads,
                   std::vector<NTerm>& out) {
  out.assign(static_cast<std::size_t>(count), NTerm{});
  auto work = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t k = begin; k < end; ++k) {
      const double x = static_cast<double>(first + k) * point.t_ratio_R;
      try {
        const modes::Sum s = modes::sum_real(x, point.chi, point.Q, ctrl.rel_tol, ctrl.l_max_cap);
        const double w = model::alpha_ratio(mode, x, point.q_a);
        out[k] = {w * s.te, w * s.tm, w * s.tail_bound, s.l_used, nullptr};
      } catch (...) {
        out[k].error = std::current_exception();
      }
    }
  };
  if (threads <= 1 || count < 2 * kBlock) {
    work(0, count);
    return;
  }
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, count / kBlock));
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = std::min(count, begin + chunk);
    pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void validate(const SeriesControl& ctrl) {
  if (!(ctrl.rel_tol > 0.0 && ctrl.rel_tol < 1.0)) throw DomainError("rel_tol must lie in (0, 1)");
  if (!(ctrl.abs_floor >= 0.0)) throw DomainError("abs_floor must be >= 0");
  if (ctrl.l_max_cap < 8 || ctrl.l_max_cap > specfun::kMaxOrder) {
    throw DomainError("l_max_cap must lie in [8, " + std::to_string(specfun::kMaxOrder) + "]");
  }
  if (ctrl.n_max_cap < 1) throw DomainError("n_max_cap must be >= 1");
}

int resolve_threads(const SeriesControl& ctrl) {
  if (ctrl.threads > 0) return ctrl.threads;
  if (const char* env = std::getenv("CPSHELL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double jost_te(int l, double x, double Q) {
  specfun::BesselOrder order(l);
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("jost_te: x must be positive and finite");
  if (Q == 0.0) return 1.0;
  return modes::RealTable(x, 2.0, Q, order.l()).jost_te(l);
}

double jost_tm(int l, double x, double Q) {
  specfun::BesselOrder order(l);
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("jost_tm: x must be positive and finite");
  if (Q == 0.0) return 1.0;
  return modes::RealTable(x, 2.0, Q, order.l()).jost_tm(l);
}

ModeTerm mode_term(int l, std::int64_t n, const model::DimensionlessPoint& point) {
  specfun::BesselOrder order(l);
  if (n < 1) throw DomainError("mode_term: n must be >= 1 (the zero mode is separate)");
  if (!(point.t_ratio_R > 0.0)) throw DomainError("mode_term: temperature must be positive");
  ModeTerm out;
  out.l = l;
  out.n = n;
  out.x = static_cast<double>(n) * point.t_ratio_R;
  out.z = point.chi * out.x;
  const modes::Shares s = modes::RealTable(out.x, point.chi, point.Q, order.l()).shares(l);
  out.te = s.te;
  out.tm = s.tm;
  return out;
}

double zero_mode_coefficient(double r) {
  if (!(r > 0.0)) throw DomainError("zero mode requires r > 0");
  const double p = (((6.0 * r + 24.0) * r + 33.0) * r + 18.0) * r + 4.0;
  const double chi = 1.0 + r;
  const double chi2 = chi * chi;
  const double r2 = r + 2.0;
  return p / (2.0 * r * r * r * chi2 * chi2 * r2 * r2 * r2);
}

double zero_mode_series(double r, const SeriesControl& ctrl) {
  if (!(r > 0.0)) throw DomainError("zero mode requires r > 0");
  const double chi = 1.0 + r;
  const double x = 1e-4;
  const double Q = 1.0;
  const double coarse = modes::sum_real(x, chi, Q, ctrl.rel_tol, ctrl.l_max_cap).total();
  const double fine = modes::sum_real(0.5 * x, chi, Q, ctrl.rel_tol, ctrl.l_max_cap).total();
  const double limit = (4.0 * fine - coarse) / 3.0;
  // e0(0) = Q sum nu g_l(0); the zero mode is -(2 tau_R / chi^2) (1/2) e0(0).
  return limit / (chi * chi);
}

double zero_mode(const model::DimensionlessPoint& point, double alpha0, double T, double R,
                 const UnitSystem& units) {
  if (!(R > 0.0)) throw DomainError("zero_mode: R must be positive");
  if (point.Q == 0.0) return 0.0;
  return -units.k_B * T * alpha0 / (R * R * R) * zero_mode_coefficient(point.r);
}

EnergyBreakdown free_energy_reduced(const model::DimensionlessPoint& point, model::PolarizabilityMode mode,
                                    const SeriesControl& ctrl) {
  validate(ctrl);
  if (!(point.r > 0.0)) throw DomainError("free_energy: r must be positive");
  if (!(point.t_ratio_R > 0.0)) throw DomainError("free_energy: the Matsubara sum needs T > 0");
  if (!(point.Q >= 0.0)) throw DomainError("free_energy: Q must be >= 0");
  EnergyBreakdown out;
  if (point.Q == 0.0) return out;

  const double prefactor = -2.0 * point.t_ratio_R / (point.chi * point.chi);
  // Half of e0(0), so that prefactor * half_zero is the zero mode.
  const double half_zero = 0.5 * point.chi * point.chi * zero_mode_coefficient(point.r);
  const double floor = ctrl.abs_floor / std::fabs(prefactor);
  const int threads = resolve_threads(ctrl);

  numerics::CompensatedSum te, tm, l_tails;
  tm.add(half_zero);
  int quiet = 0;
  int l_used = 0;
  double last_term = 0.0;
  std::int64_t n_stop = 0;
  std::vector<NTerm> wave;
  const std::int64_t wave_size = kBlock * std::max(1, threads);

  for (std::int64_t first = 1; n_stop == 0; first += wave_size) {
    if (first > ctrl.n_max_cap) {
      throw ConvergenceError("Matsubara sum reached n_max_cap = " + std::to_string(ctrl.n_max_cap),
                             prefactor * (te.value() + tm.value()),
                             std::fabs(prefactor) * static_cast<double>(ctrl.n_max_cap) * last_term);
    }
    const std::int64_t count = std::min(wave_size, ctrl.n_max_cap - first + 1);
    evaluate_wave(first, count, point, mode, ctrl, threads, wave);
    for (std::int64_t k = 0; k < count; ++k) {
      const std::int64_t n = first + k;
      const NTerm& t = wave[k];
      if (t.error) std::rethrow_exception(t.error);
      te.add(t.te);
      tm.add(t.tm);
      l_tails.add(t.l_tail);
      l_used = std::max(l_used, t.l_used);
      last_term = t.te + t.tm;
      const double partial = te.value() + tm.value();
      const double remainder = static_cast<double>(n) * last_term;
      quiet = (remainder < std::max(ctrl.rel_tol * std::fabs(partial), floor)) ? quiet + 1 : 0;
      if (quiet >= kQuietRun) {
        n_stop = n;
        break;
      }
    }
  }

  out.zero_mode = prefactor * half_zero;
  out.te_share = prefactor * te.value();
  out.tm_share = prefactor * tm.value();
  out.total = prefactor * (te.value() + tm.value());
  out.l_max_used = l_used;
  out.n_max_used = n_stop;
  out.truncation_bound =
      std::fabs(prefactor) * (l_tails.value() + static_cast<double>(n_stop) * last_term);
  return out;
}

EnergyBreakdown free_energy(const model::PhysicalSystem& sys, const model::Polarizability& pol,
                            const SeriesControl& ctrl, const UnitSystem& units) {
  const model::PhysicalSystem merged = model::with_polarizability(sys, pol);
  const model::DimensionlessPoint point = model::reduce(merged, units);
  const double unit = model::energy_unit(merged, units);
  SeriesControl reduced = ctrl;
  reduced.abs_floor = ctrl.abs_floor / unit;
  EnergyBreakdown out = free_energy_reduced(point, pol.mode, reduced);
  out.total *= unit;
  out.zero_mode *= unit;
  out.te_share *= unit;
  out.tm_share *= unit;
  out.truncation_bound *= unit;
  return out;
}

}  // namespace cpshell::matsubara
