#include "fspohn/airy.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>

#include "dd.hpp"
#include "fspohn/errors.hpp"

namespace fspohn::airy {

namespace {

using detail::DD;
using detail::dd_add;
using detail::dd_div_d;
using detail::dd_mul;
using detail::dd_mul_d;
using detail::dd_neg;
using detail::dd_sqrt;
using detail::dd_value;
using detail::two_sum;

constexpr double kSqrtPi = 1.7724538509055160273;

// Ai(0), Ai'(0) and the phase constants as double-double pairs.
constexpr DD kAi0{0.3550280538878172, 2.05233632436212e-17};
constexpr DD kAip0{-0.2588194037928068, 2.522243111610832e-17};
constexpr DD kTwoThirds{0.6666666666666666, 3.700743415417188e-17};
constexpr DD kPiQuarter{0.7853981633974483, 3.061616997868383e-17};
constexpr DD kTwoPi{6.283185307179586, 2.4492935982947064e-16};

// Branch windows.  The plain window is bounded by e^{2 zeta} cancellation
// against 1e-12 targets; the compensated window extends further on the
// negative side (cancellation ~e^{zeta} there) so that finite-difference
// consumers see the smooth ~1e-18 series error instead of the jagged
// ~1e-14 floor of the oscillatory asymptotics.
constexpr double kPlainLo = -4.25;
constexpr double kPlainHi = 2.5;
constexpr double kSeriesLo = -13.5;
constexpr double kSeriesHi = 9.0;
constexpr double kDomainCap = 200.0;

void check_domain(double x) {
  if (!std::isfinite(x)) throw DomainError("airy: non-finite argument");
  if (std::abs(x) > kDomainCap)
    throw DomainError("airy: |x| > 200 outside documented validity range");
}

// Maclaurin series in plain doubles; adequate for |x| <= 4.25 where the
// e^{2 zeta} cancellation stays below ~1e3.
Pair maclaurin_plain(double x) {
  const double x3 = x * x * x;
  double f = 1.0, tf = 1.0;
  for (int k = 0; k < 120; ++k) {
    tf *= x3 / (double(3 * k + 2) * double(3 * k + 3));
    f += tf;
    if (std::abs(tf) < 1e-18 * std::abs(f)) break;
  }
  double g = x, tg = x;
  for (int k = 0; k < 120; ++k) {
    tg *= x3 / (double(3 * k + 3) * double(3 * k + 4));
    g += tg;
    if (std::abs(tg) < 1e-18 * (std::abs(g) + 1e-30)) break;
  }
  double fp = 0.0, u = 0.5 * x * x;
  for (int k = 1; k < 120; ++k) {
    fp += u;
    u *= x3 * double(k + 1) / (double(k) * double(3 * k + 2) * double(3 * k + 3));
    if (std::abs(u) < 1e-18 * (std::abs(fp) + 1e-30)) break;
  }
  double gp = 0.0, v = 1.0;
  for (int k = 0; k < 120; ++k) {
    gp += v;
    v *= x3 / (double(3 * k + 1) * double(3 * k + 3));
    if (std::abs(v) < 1e-18 * std::abs(gp)) break;
  }
  return {kAi0.hi * f + kAip0.hi * g, kAi0.hi * fp + kAip0.hi * gp};
}

double maclaurin_dd(double x, bool deriv) {
  const DD x3 = dd_mul_d(dd_mul_d(DD{x, 0.0}, x), x);
  if (!deriv) {
    DD f{1.0, 0.0}, tf{1.0, 0.0};
    DD g{x, 0.0}, tg{x, 0.0};
    for (int k = 0; k < 300; ++k) {
      tf = dd_div_d(dd_mul(tf, x3), double(3 * k + 2) * double(3 * k + 3));
      f = dd_add(f, tf);
      tg = dd_div_d(dd_mul(tg, x3), double(3 * k + 3) * double(3 * k + 4));
      g = dd_add(g, tg);
      if (std::abs(tf.hi) < 1e-38 * std::abs(f.hi) + 1e-320 &&
          std::abs(tg.hi) < 1e-38 * (std::abs(g.hi) + 1e-300) + 1e-320)
        break;
    }
    return dd_value(dd_add(dd_mul(f, kAi0), dd_mul(g, kAip0)));
  }
  DD fp{0.0, 0.0};
  DD u = dd_mul_d(dd_mul_d(DD{x, 0.0}, x), 0.5);
  for (int k = 1; k < 300; ++k) {
    fp = dd_add(fp, u);
    u = dd_div_d(dd_mul_d(dd_mul(u, x3), double(k + 1)),
                 double(k) * double(3 * k + 2) * double(3 * k + 3));
    if (std::abs(u.hi) < 1e-38 * (std::abs(fp.hi) + 1e-300)) break;
  }
  DD gp{0.0, 0.0}, v{1.0, 0.0};
  for (int k = 0; k < 300; ++k) {
    gp = dd_add(gp, v);
    v = dd_div_d(dd_mul(v, x3), double(3 * k + 1) * double(3 * k + 3));
    if (std::abs(v.hi) < 1e-38 * (std::abs(gp.hi) + 1e-300)) break;
  }
  return dd_value(dd_add(dd_mul(fp, kAi0), dd_mul(gp, kAip0)));
}

constexpr int kAsymTerms = 60;

struct AsymTables {
  std::array<double, kAsymTerms> u{};
  std::array<double, kAsymTerms> v{};
  AsymTables() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kAsymTerms; ++k) {
      u[k] = u[k - 1] * double(6 * k - 5) * double(6 * k - 1) / (72.0 * k);
      v[k] = u[k] * double(6 * k + 1) / double(1 - 6 * k);
    }
  }
};

const AsymTables& asym_tables() {
  static const AsymTables t;
  return t;
}

// Alternating asymptotic sum with min-term truncation.
double alt_sum(const std::array<double, kAsymTerms>& c, double zeta, int start,
               int step) {
  double s = 0.0, prev = HUGE_VAL, sign = 1.0;
  double zp = std::pow(zeta, double(start));
  const double zs = std::pow(zeta, double(step));
  for (int j = start; j < kAsymTerms; j += step) {
    double t = c[j] / zp;
    if (std::abs(t) >= std::abs(prev)) break;
    s += sign * t;
    if (std::abs(t) < 1e-18 * std::abs(s) + 1e-300) break;
    prev = t;
    sign = -sign;
    zp *= zs;
  }
  return s;
}

Pair asym_pos(double x) {
  const auto& tb = asym_tables();
  const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
  if (zeta > 740.0) return {0.0, 0.0};
  const double q = std::pow(x, 0.25);
  const double e = std::exp(-zeta);
  return {e / (2.0 * kSqrtPi * q) * alt_sum(tb.u, zeta, 0, 1),
          -q * e / (2.0 * kSqrtPi) * alt_sum(tb.v, zeta, 0, 1)};
}

// Oscillatory branch; the phase zeta - pi/4 is reduced mod 2pi in
// double-double so large |x| keeps full phase accuracy.
Pair asym_neg(double x) {
  const auto& tb = asym_tables();
  const double z = -x;
  const DD zdd{z, 0.0};
  const DD zeta_dd = dd_mul(dd_mul(kTwoThirds, zdd), dd_sqrt(zdd));
  const double zeta = dd_value(zeta_dd);
  DD th = dd_add(zeta_dd, dd_neg(kPiQuarter));
  const double n = std::floor(th.hi / kTwoPi.hi);
  th = dd_add(th, dd_mul_d(kTwoPi, -n));
  const double thf = dd_value(th);
  const double c = std::cos(thf), s = std::sin(thf);
  const double q = std::pow(z, 0.25);
  const double pu = alt_sum(tb.u, zeta, 0, 2);
  const double qu = alt_sum(tb.u, zeta, 1, 2);
  const double pv = alt_sum(tb.v, zeta, 0, 2);
  const double qv = alt_sum(tb.v, zeta, 1, 2);
  return {(c * pu + s * qu) / (kSqrtPi * q),
          q / kSqrtPi * (s * pv - c * qv)};
}

struct ZeroTable {
  std::array<Zero, kZeroTableMax> entry{};
  std::atomic<int> built{0};
  std::mutex write_lock;
};

ZeroTable& zero_table() {
  static ZeroTable t;
  return t;
}

constexpr double kZeroTol = 1e-11;

Zero refine_zero(int k) {
  double w = asymptotic_zero(k).omega;
  double lo = w - 0.05, hi = w + 0.05;
  if (ai(-lo) * ai(-hi) > 0.0) {
    lo = w - 0.2;
    hi = w + 0.2;
  }
  double slo = ai(-lo);
  for (int it = 0; it < 80; ++it) {
    Pair p = ai_both(-w);
    if (std::abs(p.value) <= 1e-13) break;
    if (slo * p.value < 0.0) {
      hi = w;
    } else {
      lo = w;
      slo = p.value;
    }
    double wn = w + p.value / p.deriv;
    if (!(wn > lo && wn < hi) || !std::isfinite(wn)) wn = 0.5 * (lo + hi);
    if (wn == w) break;
    w = wn;
  }
  Pair p = ai_both(-w);
  if (std::abs(p.value) > kZeroTol)
    throw NumericError("airy_zero: refinement did not reach tolerance at k=" +
                       std::to_string(k));
  const double expect = (k % 2 == 1) ? 1.0 : -1.0;
  if (p.deriv * expect <= 0.0)
    throw NumericError("airy_zero: derivative sign violates (-1)^{k-1} at k=" +
                       std::to_string(k));
  return {w, p.deriv};
}

}  // namespace

double ai(double x) {
  check_domain(x);
  if (x >= kPlainLo && x <= kPlainHi) return maclaurin_plain(x).value;
  if (x >= kSeriesLo && x <= kSeriesHi) return maclaurin_dd(x, false);
  return (x > 0.0) ? asym_pos(x).value : asym_neg(x).value;
}

double ai_prime(double x) {
  check_domain(x);
  if (x >= kPlainLo && x <= kPlainHi) return maclaurin_plain(x).deriv;
  if (x >= kSeriesLo && x <= kSeriesHi) return maclaurin_dd(x, true);
  return (x > 0.0) ? asym_pos(x).deriv : asym_neg(x).deriv;
}

Pair ai_both(double x) {
  check_domain(x);
  if (x >= kPlainLo && x <= kPlainHi) return maclaurin_plain(x);
  if (x >= kSeriesLo && x <= kSeriesHi)
    return {maclaurin_dd(x, false), maclaurin_dd(x, true)};
  return (x > 0.0) ? asym_pos(x) : asym_neg(x);
}

Zero airy_zero(int k) {
  if (k < 1) throw DomainError("airy_zero: k must be >= 1");
  if (k > kZeroTableMax)
    throw CapacityError("airy_zero: k exceeds table cap " +
                        std::to_string(kZeroTableMax));
  ZeroTable& t = zero_table();
  if (k > t.built.load(std::memory_order_acquire)) {
    std::scoped_lock lock(t.write_lock);
    for (int j = t.built.load(std::memory_order_relaxed) + 1; j <= k; ++j) {
      t.entry[j - 1] = refine_zero(j);
      t.built.store(j, std::memory_order_release);
    }
  }
  return t.entry[k - 1];
}

Zero asymptotic_zero(int k) {
  if (k < 1) throw DomainError("asymptotic_zero: k must be >= 1");
  const double z = 1.5 * 3.14159265358979323846 * (k - 0.25);
  const double corr = 1.0 + 5.0 / (48.0 * z * z);
  const double omega = std::cbrt(z * z) * corr;
  const double mag = std::pow(z, 1.0 / 6.0) / kSqrtPi * corr;
  return {omega, (k % 2 == 1) ? mag : -mag};
}

}  // namespace fspohn::airy
