#pragma once

#include <cmath>

namespace mzkit {

/// Double-double value: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
/// giving roughly 32 significant decimal digits. Used for the extended
/// precision Gram assembly and basis evaluation, where the monomial basis
/// conditioning exhausts plain doubles.
struct DD {
  double hi = 0.0;
  double lo = 0.0;

  DD() = default;
  DD(double h) : hi(h), lo(0.0) {}
  DD(double h, double l) : hi(h), lo(l) {}

  double value() const { return hi + lo; }
};

namespace dd_detail {

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD quick_two_sum(double a, double b) {
  // requires |a| >= |b|
  double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline DD operator+(DD a, DD b) {
  using namespace dd_detail;
  DD s = two_sum(a.hi, b.hi);
  DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
  using namespace dd_detail;
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD operator/(DD a, DD b) {
  using namespace dd_detail;
  double q1 = a.hi / b.hi;
  DD r = a - DD(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - DD(q2) * b;
  double q3 = r.hi / b.hi;
  DD q = quick_two_sum(q1, q2);
  q.lo += q3;
  return quick_two_sum(q.hi, q.lo);
}

inline DD sqrt(DD a) {
  // one Newton step on top of the double sqrt doubles the precision
  if (a.hi == 0.0) return {0.0, 0.0};
  double x = std::sqrt(a.hi);
  DD x2 = dd_detail::two_prod(x, x);
  DD err = a - x2;
  return dd_detail::quick_two_sum(x, err.hi / (2.0 * x));
}

inline bool operator<(DD a, DD b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(DD a, DD b) { return b < a; }

}  // namespace mzkit
