#pragma once

#include <cmath>

// Double-double (compensated) arithmetic: error-free transforms after
// Knuth (two_sum) and Dekker (split/two_prod).  No FMA dependency; requires
// strict IEEE double semantics (build with contraction off, no fast-math).

namespace fspohn::detail {

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline void split(double a, double& h, double& l) {
  double c = 134217729.0 * a;  // 2^27 + 1
  h = c - (c - a);
  l = a - h;
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  double ah, al, bh, bl;
  split(a, ah, al);
  split(b, bh, bl);
  return {p, ((ah * bh - p) + ah * bl + al * bh) + al * bl};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  double e = s.lo + a.lo + b.lo;
  return two_sum(s.hi, e);
}

inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  double e = p.lo + a.hi * b.lo + a.lo * b.hi;
  return two_sum(p.hi, e);
}

inline DD dd_mul_d(DD a, double d) {
  DD p = two_prod(a.hi, d);
  double e = p.lo + a.lo * d;
  return two_sum(p.hi, e);
}

inline DD dd_div_d(DD a, double d) {
  double q1 = a.hi / d;
  DD p = two_prod(q1, d);
  double q2 = (((a.hi - p.hi) - p.lo) + a.lo) / d;
  return two_sum(q1, q2);
}

inline DD dd_neg(DD a) { return {-a.hi, -a.lo}; }

inline DD dd_sqrt(DD a) {
  double x = std::sqrt(a.hi);
  DD ax = dd_div_d(a, x);
  DD s = two_sum(x, ax.hi);
  double e = s.lo + ax.lo;
  DD r = two_sum(s.hi, e);
  return dd_mul_d(r, 0.5);
}

inline double dd_value(DD a) { return a.hi + a.lo; }

}  // namespace fspohn::detail
