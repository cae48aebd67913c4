#include "cpshell/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cpshell/errors.hpp"

namespace cpshell::specfun {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxCfIterations = 10'000'000;
constexpr double kRescaleAbove = 0x1p512;
constexpr long kRescaleShift = 512;

void check_argument(double x, const char* who) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(who) + ": argument must be positive and finite");
  }
}

// Modified Lentz evaluation of 1/(b_l + a/(b_{l+1} + a/(b_{l+2} + ...))) with
// b_k = (2k+1)/x and a = +1 (I-ratio) or a = -1 (J-ratio).
double ratio_continued_fraction(int l, double x, double a) {
  double f = kTiny;
  double c = f;
  double d = 0.0;
  for (int k = 0; k < kMaxCfIterations; ++k) {
    const double b = (2.0 * (l + k) + 1.0) / x;
    const double ak = (k == 0) ? 1.0 : a;
    d = b + ak * d;
    if (d == 0.0) d = kTiny;
    c = b + ak / c;
    if (c == 0.0) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < kEps) return f;
  }
  throw ConvergenceError("Bessel ratio continued fraction did not converge", f, 0.0);
}

double debye_t(double y) { return 1.0 / std::sqrt(1.0 + y * y); }

double debye_eta(double y) {
  const double root = std::sqrt(1.0 + y * y);
  return root + std::log(y / (1.0 + root));
}

}  // namespace

BesselOrder::BesselOrder(int l) : l_(l) {
  if (l < 1) throw DomainError("multipole index l must be >= 1");
  if (l > kMaxOrder) {
    throw CapabilityError("multipole index l = " + std::to_string(l) + " exceeds supported cap " +
                          std::to_string(kMaxOrder));
  }
}

double RiccatiPair::s_value() const { return Scaled{s, s_exponent}.value(); }
double RiccatiPair::s_prime_value() const { return Scaled{s_prime, s_exponent}.value(); }
double RiccatiPair::e_value() const { return Scaled{e, e_exponent}.value(); }
double RiccatiPair::e_prime_value() const { return Scaled{e_prime, e_exponent}.value(); }
double RiccatiPair::wronskian() const {
  return Scaled{s * e_prime - s_prime * e, s_exponent + e_exponent}.value();
}

double OscillatoryRiccatiPair::j_value() const { return Scaled{j, j_exponent}.value(); }
double OscillatoryRiccatiPair::j_prime_value() const { return Scaled{j_prime, j_exponent}.value(); }
double OscillatoryRiccatiPair::y_value() const { return Scaled{y, y_exponent}.value(); }
double OscillatoryRiccatiPair::y_prime_value() const { return Scaled{y_prime, y_exponent}.value(); }
double OscillatoryRiccatiPair::wronskian() const {
  return Scaled{j * y_prime - j_prime * y, j_exponent + y_exponent}.value();
}

std::vector<double> e_ratios(double y, int l_max) {
  std::vector<double> ratio(static_cast<std::size_t>(l_max) + 1, 0.0);
  if (l_max < 1) return ratio;
  ratio[1] = 1.0 + 1.0 / y;
  for (int l = 1; l < l_max; ++l) ratio[l + 1] = 1.0 / ratio[l] + (2.0 * l + 1.0) / y;
  return ratio;
}

double s_ratio_continued_fraction(int l, double x) {
  check_argument(x, "s_ratio_continued_fraction");
  return ratio_continued_fraction(l, x, 1.0);
}

ModifiedRiccatiRatios::ModifiedRiccatiRatios(double x, int l_max)
    : x_(x), l_max_(l_max), e_ratio_(e_ratios(x, l_max)), s_ratio_(static_cast<std::size_t>(l_max) + 2) {
  check_argument(x, "ModifiedRiccatiRatios");
  s_ratio_[l_max + 1] = ratio_continued_fraction(l_max + 1, x, 1.0);
  for (int l = l_max; l >= 1; --l) s_ratio_[l] = 1.0 / ((2.0 * l + 1.0) / x + s_ratio_[l + 1]);
}

RiccatiPair riccati_ik(BesselOrder order, double x) {
  check_argument(x, "riccati_ik");
  const int l = order.l();
  const ModifiedRiccatiRatios ratios(x, l);

  Scaled e = Scaled::exp_of(-x);
  for (int k = 1; k <= l; ++k) e = e * ratios.e_ratio(k);
  const Scaled s = ratios.se_product(l) / e;

  RiccatiPair out;
  out.s = s.mantissa;
  out.s_prime = s.mantissa * ratios.s_log_derivative(l);
  out.s_exponent = s.exponent;
  out.e = e.mantissa;
  out.e_prime = -e.mantissa * ratios.e_log_derivative_abs(l);
  out.e_exponent = e.exponent;
  return out;
}

OscillatoryRiccatiTable::OscillatoryRiccatiTable(double u, int l_max)
    : u_(u), l_max_(l_max), j_(static_cast<std::size_t>(l_max) + 2), y_(static_cast<std::size_t>(l_max) + 2) {
  check_argument(u, "OscillatoryRiccatiTable");
  if (l_max < 0) throw DomainError("OscillatoryRiccatiTable: l_max must be >= 0");
  const double sin_u = std::sin(u);
  const double cos_u = std::cos(u);

  // Y: upward, Y_{-1} = sin u, Y_0 = -cos u.
  {
    double prev = sin_u;
    double cur = -cos_u;
    long shift = 0;
    y_[0] = Scaled::from(prev);
    y_[1] = Scaled::from(cur);
    for (int l = 0; l < l_max; ++l) {
      double next = (2.0 * l + 1.0) / u * cur - prev;
      if (std::fabs(next) > kRescaleAbove) {
        next = std::ldexp(next, -kRescaleShift);
        cur = std::ldexp(cur, -kRescaleShift);
        shift += kRescaleShift;
      }
      prev = cur;
      cur = next;
      y_[l + 2] = Scaled{cur, shift}.normalized();
    }
  }

  // J: Miller backward recurrence from above max(l_max, u), seeded by the
  // continued fraction for J_{M+1}/J_M and normalised with J_{-1}, J_0 = cos u, sin u.
  {
    const int top = std::max(l_max, static_cast<int>(std::ceil(u))) + 20 +
                    static_cast<int>(std::sqrt(std::max(l_max, static_cast<int>(u)) + 1.0));
    double upper = ratio_continued_fraction(top + 1, u, -1.0);  // J_{top+1} / J_top
    double cur = 1.0;
    long shift = 0;
    for (int l = top; l >= 0; --l) {
      if (l <= l_max) j_[l + 1] = Scaled{cur, shift};
      double lower = (2.0 * l + 1.0) / u * cur - upper;
      if (std::fabs(lower) > kRescaleAbove) {
        lower = std::ldexp(lower, -kRescaleShift);
        cur = std::ldexp(cur, -kRescaleShift);
        shift += kRescaleShift;
      }
      upper = cur;
      cur = lower;
    }
    // cur = J_{-1}, upper = J_0 (unnormalised, common exponent `shift`).
    const Scaled norm = Scaled{upper * sin_u + cur * cos_u, shift}.normalized();
    j_[0] = Scaled{cur, shift} / norm;
    for (int l = 0; l <= l_max; ++l) j_[l + 1] = j_[l + 1].normalized() / norm;
  }
}

OscillatoryRiccatiPair riccati_jy(BesselOrder order, double x) {
  check_argument(x, "riccati_jy");
  const int l = order.l();
  const OscillatoryRiccatiTable table(x, l);
  const Scaled j = table.j(l);
  const Scaled y = table.y(l);
  const Scaled jp = table.j_prime(l);
  const Scaled yp = table.y_prime(l);

  OscillatoryRiccatiPair out;
  out.j_exponent = j.exponent;
  out.j = j.mantissa;
  out.j_prime = Scaled{jp.mantissa, jp.exponent - j.exponent}.value();
  out.y_exponent = y.exponent;
  out.y = y.mantissa;
  out.y_prime = Scaled{yp.mantissa, yp.exponent - y.exponent}.value();
  return out;
}

double debye_tail_estimate(BesselOrder order, double x, double z) {
  check_argument(x, "debye_tail_estimate");
  check_argument(z, "debye_tail_estimate");
  const double nu = order.nu();
  if (z < x) throw CapabilityError("debye_tail_estimate: requires z >= x");
  if (nu < 10.0 * std::max({1.0, x, z})) {
    throw CapabilityError("debye_tail_estimate: order too small for the uniform expansion");
  }
  const double chi = z / x;
  const double tz = debye_t(z / nu);
  const double exponent = -2.0 * nu * (debye_eta(z / nu) - debye_eta(x / nu));
  const double tm = nu * nu * (1.0 / tz + tz) / (2.0 * chi);
  const double te = 0.5 * x * z * tz;
  return (tm + te) * std::exp(exponent);
}

double debye_tail_sum(BesselOrder order, double x, double z) {
  const int l = order.l();
  if (l + 2 > kMaxOrder) return std::numeric_limits<double>::infinity();
  const double first = debye_tail_estimate(BesselOrder(l + 1), x, z);
  const double second = debye_tail_estimate(BesselOrder(l + 2), x, z);
  if (first == 0.0) return 0.0;
  const double q = second / first;
  if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
  return first / (1.0 - q);
}

}  // namespace cpshell::specfun
