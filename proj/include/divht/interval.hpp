#pragma once
#include <gmpxx.h>

#include <string>

namespace divht {

// mpq_class(num, den) does not canonicalize; this does
mpq_class make_q(const mpz_class& num, const mpz_class& den);
mpz_class pow_z(const mpz_class& base, unsigned long e);
mpq_class pow_q(const mpq_class& base, long e);  // negative e allowed, base != 0

double next_up(double x);
double next_down(double x);

// closed interval [lo, hi] with double endpoints; every operation rounds
// outward, so a value contained on entry stays contained.  infinities are
// legal endpoints; an operation that would produce NaN widens to the whole
// line instead.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {}

  static Interval point(double x) { return {x, x}; }
  static Interval whole();
  static Interval exact(const mpq_class& q);    // tightest enclosure of q
  static Interval log_abs(const mpz_class& z);  // log|z|, z != 0
  static Interval log_abs(const mpq_class& q);  // log|q|, q != 0
  static Interval log_of(unsigned long n);      // log n, n >= 1

  bool valid() const { return lo <= hi; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return contains(0.0); }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  bool is_finite() const;
  double mid() const;
  double width_up() const;  // upper bound on hi - lo

  Interval operator-() const { return {-hi, -lo}; }
  Interval operator+(const Interval& o) const;
  Interval operator-(const Interval& o) const;
  Interval operator*(const Interval& o) const;
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }

  Interval scaled(const mpq_class& c) const;      // c * [lo, hi]
  Interval divided_by(const mpz_class& m) const;  // m > 0

  std::string str() const;
};

Interval hull(const Interval& a, const Interval& b);

// exact test: hi - lo <= eps, evaluated in rational arithmetic
bool width_within(const Interval& iv, const mpq_class& eps);

}  // namespace divht
