#include "cpshell/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cpshell/errors.hpp"
#include "cpshell/numerics.hpp"

namespace cpshell::modes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailSafety = 2.0;
// Beyond this value of 2(z - x) every term underflows.
constexpr double kUnderflowExponent = 1490.0;

// Tracks the last few terms of an l-series and bounds the remainder by a
// geometric series once the term ratios are decreasing.
class RatioTail {
 public:
  void push(double term) {
    prev_ratio_[1] = prev_ratio_[0];
    prev_ratio_[0] = ratio_;
    ratio_ = (last_ > 0.0) ? term / last_ : kInf;
    last_ = term;
    ++count_;
  }
  double bound() const {
    if (last_ == 0.0 && count_ > 0) return 0.0;
    if (count_ < 4) return kInf;
    if (!(ratio_ < 1.0) || ratio_ > prev_ratio_[0] || prev_ratio_[0] > prev_ratio_[1]) return kInf;
    return kTailSafety * last_ * ratio_ / (1.0 - ratio_);
  }

 private:
  double last_ = 0.0;
  double ratio_ = kInf;
  double prev_ratio_[2] = {kInf, kInf};
  int count_ = 0;
};

bool accept(double term, double partial, double tail, double rel_tol) {
  if (partial == 0.0) return term == 0.0 && tail == 0.0;
  return term <= 0.1 * rel_tol * std::fabs(partial) && tail <= rel_tol * std::fabs(partial);
}

std::complex<double> product(const Scaled& a, const Scaled& re, const Scaled& im) {
  return {(a * re).value(), (a * im).value()};
}

int clamp_order(double l, int l_cap) {
  return static_cast<int>(std::min<double>(l_cap, std::max(8.0, std::ceil(l))));
}

}  // namespace

RealTable::RealTable(double x, double chi, double Q, int l_max)
    : x_(x),
      z_(chi * x),
      chi_(chi),
      Q_(Q),
      l_max_(l_max),
      at_x_(x, l_max),
      e_ratio_z_(specfun::e_ratios(chi * x, l_max)),
      rho_(static_cast<std::size_t>(l_max) + 1) {
  rho_[0] = Scaled::exp_of(-(z_ - x_));
  for (int l = 1; l <= l_max; ++l) rho_[l] = rho_[l - 1] * (e_ratio_z_[l] / at_x_.e_ratio(l));
}

Shares RealTable::shares(int l) const {
  const double sx = at_x_.e_ratio(l);
  const double sz = e_ratio_z_[l];
  const double p_hat = 1.0 / (x_ / sx + x_ / at_x_.s_ratio(l));  // s e / x
  const double a = (l + 1) + x_ * at_x_.s_ratio(l + 1);           // x s'/s
  const double b = l + x_ / sx;                                   // -x e'/e at x
  const double bz = l + z_ / sz;                                  // -z e'/e at z
  const double rho2 = (rho_[l] * rho_[l]).value();
  const double ll1 = static_cast<double>(l) * (l + 1);
  Shares out;
  out.te = x_ * x_ * p_hat * p_hat * rho2 / (1.0 + Q_ * p_hat);
  out.tm = p_hat * p_hat * a * a * (bz * bz + ll1) * rho2 / (chi_ * chi_ * (x_ * x_ + Q_ * p_hat * a * b));
  return out;
}

double RealTable::jost_te(int l) const {
  const double p_hat = 1.0 / (x_ / at_x_.e_ratio(l) + x_ / at_x_.s_ratio(l));
  return 1.0 + Q_ * p_hat;
}

double RealTable::jost_tm(int l) const {
  const double p_hat = 1.0 / (x_ / at_x_.e_ratio(l) + x_ / at_x_.s_ratio(l));
  const double a = (l + 1) + x_ * at_x_.s_ratio(l + 1);
  const double b = l + x_ / at_x_.e_ratio(l);
  return 1.0 + Q_ * p_hat * a * b / (x_ * x_);
}

ImaginaryTable::ImaginaryTable(double u, double chi, double Q, int l_max)
    : u_(u), w_(chi * u), chi_(chi), Q_(Q), l_max_(l_max), at_u_(u, l_max), at_w_(chi * u, l_max) {}

ComplexShares ImaginaryTable::shares(int l) const {
  using cd = std::complex<double>;
  const Scaled ju = at_u_.j(l), yu = at_u_.y(l);
  const Scaled jpu = at_u_.j_prime(l), ypu = at_u_.y_prime(l);
  const Scaled jw = at_w_.j(l), yw = at_w_.y(l);
  const Scaled jpw = at_w_.j_prime(l), ypw = at_w_.y_prime(l);

  const cd ju_hw = product(ju, jw, yw);
  const cd ju_hu = product(ju, ju, yu);
  const cd jpu_hpw = product(jpu, jpw, ypw);
  const cd jpu_hw = product(jpu, jw, yw);
  const cd jpu_hpu = product(jpu, jpu, ypu);

  const cd i(0.0, 1.0);
  const cd d_te = 1.0 + i * (Q_ / u_) * ju_hu;
  const cd d_tm = 1.0 + i * (Q_ / u_) * jpu_hpu;
  const double eps = 64.0 * std::numeric_limits<double>::epsilon();
  if (!(std::abs(d_te) > eps * (1.0 + std::abs((Q_ / u_) * ju_hu)))) {
    throw SingularityError("continued TE Jost function vanishes", l, u_);
  }
  if (!(std::abs(d_tm) > eps * (1.0 + std::abs((Q_ / u_) * jpu_hpu)))) {
    throw SingularityError("continued TM Jost function vanishes", l, u_);
  }

  const double ll1 = static_cast<double>(l) * (l + 1);
  ComplexShares out;
  out.te = std::conj(ju_hw * ju_hw / d_te);
  out.tm = std::conj((jpu_hpw * jpu_hpw + jpu_hw * jpu_hw * (ll1 / (w_ * w_))) / d_tm);
  return out;
}

std::optional<JostCrossing> first_jost_sign_change(double Q, double u_max, int l_max) {
  if (!(u_max > 0.0) || Q == 0.0) return std::nullopt;
  constexpr int kSteps = 400;
  const double du = u_max / kSteps;
  std::vector<double> previous;
  for (int k = 1; k <= kSteps; ++k) {
    const double u = du * k;
    const specfun::OscillatoryRiccatiTable table(u, l_max);
    std::vector<double> current(static_cast<std::size_t>(2 * l_max));
    for (int l = 1; l <= l_max; ++l) {
      const Scaled jp = table.j_prime(l);
      const Scaled j = table.j(l);
      // Re(1 + i (Q/u) J H) = 1 - (Q/u) J Y.
      current[2 * (l - 1)] = 1.0 - (Q / u) * (j * table.y(l)).value();
      current[2 * (l - 1) + 1] = 1.0 - (Q / u) * (jp * table.y_prime(l)).value();
    }
    if (!previous.empty()) {
      for (std::size_t i = 0; i < current.size(); ++i) {
        if ((previous[i] > 0.0) != (current[i] > 0.0)) {
          return JostCrossing{u - du, static_cast<int>(i / 2) + 1, i % 2 == 0};
        }
      }
    }
    previous = std::move(current);
  }
  return std::nullopt;
}

int initial_l_max(double x, double chi, int l_cap) {
  const double r = chi - 1.0;
  const double spread = std::min(chi * x, std::sqrt(40.0 * chi * x / r));
  return clamp_order(20.0 + 25.0 / std::log(chi) + spread, l_cap);
}

Sum sum_real(double x, double chi, double Q, double rel_tol, int l_cap) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("sum_real: x must be finite and >= 0");
  if (!(chi > 1.0)) throw DomainError("sum_real: chi must exceed 1");
  Sum out;
  if (Q == 0.0) return out;
  const double z = chi * x;

  if (x == 0.0) {
    numerics::CompensatedSum tm;
    const double q = 1.0 / (chi * chi);
    double power = q;
    for (int l = 1; l <= l_cap; ++l) {
      power *= q;  // chi^{-2l-2}
      const double term = (l + 0.5) * (l + 1) * power;
      tm.add(term);
      // Remainder of sum nu (l+1) q^{l+1}, ratio below q (l+2.5)(l+3)/((l+1.5)(l+2)) for all later l.
      const double ratio = q * (l + 2.5) * (l + 3) / ((l + 1.5) * (l + 2));
      const double tail = term * ratio / (1.0 - ratio);
      if (ratio < 1.0 && accept(term, tm.value(), tail, rel_tol)) {
        out.tm = tm.value();
        out.l_used = l;
        out.tail_bound = tail;
        return out;
      }
    }
    throw ConvergenceError("zero-frequency l-series reached the order cap", tm.value(), kInf);
  }

  if (2.0 * (z - x) > kUnderflowExponent) return out;

  int l_max = initial_l_max(x, chi, l_cap);
  for (;;) {
    const RealTable table(x, chi, Q, l_max);
    numerics::CompensatedSum te, tm;
    RatioTail ratio_tail;
    const double sigma_nu = std::sqrt(chi * x / (chi - 1.0));
    const double geometric_from = std::min(2.0 * z, 3.0 * sigma_nu) + 2.0;
    const double debye_from = 10.0 * std::max({1.0, x, z});
    double tail = kInf;
    for (int l = 1; l <= l_max; ++l) {
      const Shares s = table.shares(l);
      const double nu = l + 0.5;
      const double te_term = Q * nu * s.te;
      const double tm_term = Q * nu * s.tm;
      te.add(te_term);
      tm.add(tm_term);
      const double term = te_term + tm_term;
      ratio_tail.push(term);
      const double partial = te.value() + tm.value();
      if (nu + 1.0 >= debye_from && l + 2 <= specfun::kMaxOrder) {
        tail = kTailSafety * specfun::debye_tail_sum(specfun::BesselOrder(l), x, z);
      } else if (nu >= geometric_from) {
        tail = ratio_tail.bound();
      } else {
        tail = kInf;
      }
      if (term == 0.0 && partial == 0.0) tail = 0.0;
      if (accept(term, partial, tail, rel_tol)) {
        out.te = te.value();
        out.tm = tm.value();
        out.l_used = l;
        out.tail_bound = tail;
        return out;
      }
    }
    if (l_max >= l_cap) {
      throw ConvergenceError("l-series at x = " + std::to_string(x) + " reached the order cap " +
                                 std::to_string(l_cap),
                             te.value() + tm.value(), tail);
    }
    l_max = std::min(2 * l_max, l_cap);
  }
}

ComplexSum sum_imaginary(double u, double chi, double Q, double rel_tol, int l_cap) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("sum_imaginary: u must be positive and finite");
  if (!(chi > 1.0)) throw DomainError("sum_imaginary: chi must exceed 1");
  ComplexSum out;
  if (Q == 0.0) return out;
  const double w = chi * u;
  int l_max = clamp_order(20.0 + 25.0 / std::log(chi) + 2.0 * w, l_cap);
  for (;;) {
    const ImaginaryTable table(u, chi, Q, l_max);
    numerics::CompensatedSum te_re, te_im, tm_re, tm_im;
    RatioTail ratio_tail;
    double tail = kInf;
    for (int l = 1; l <= l_max; ++l) {
      const ComplexShares s = table.shares(l);
      const double scale = Q * (l + 0.5);
      te_re.add(scale * s.te.real());
      te_im.add(scale * s.te.imag());
      tm_re.add(scale * s.tm.real());
      tm_im.add(scale * s.tm.imag());
      const double term = scale * std::abs(s.total());
      ratio_tail.push(term);
      tail = (l + 0.5 >= 2.0 * w + 2.0) ? ratio_tail.bound() : kInf;
      // Relative to the larger of the two parts so that a small imaginary
      // part is resolved to the same absolute accuracy as the real part.
      const double partial = std::abs(std::complex<double>(te_re.value() + tm_re.value(),
                                                           te_im.value() + tm_im.value()));
      if (accept(term, partial, tail, rel_tol)) {
        out.te = {te_re.value(), te_im.value()};
        out.tm = {tm_re.value(), tm_im.value()};
        out.l_used = l;
        out.tail_bound = tail;
        return out;
      }
    }
    if (l_max >= l_cap) {
      throw ConvergenceError("imaginary-axis l-series reached the order cap", te_re.value() + tm_re.value(),
                             tail);
    }
    l_max = std::min(2 * l_max, l_cap);
  }
}

}  // namespace cpshell::modes
