#include "divht/interval.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <limits>

#include "divht/errors.hpp"

namespace divht {

mpq_class make_q(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw MathRefusal("zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

mpz_class pow_z(const mpz_class& base, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

mpq_class pow_q(const mpq_class& base, long e) {
  if (e == 0) return 1;
  if (base == 0) throw MathRefusal("zero base with nonpositive exponent");
  unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
  mpq_class r = make_q(pow_z(base.get_num(), a), pow_z(base.get_den(), a));
  if (e < 0) r = make_q(r.get_den(), r.get_num());
  return r;
}

double next_up(double x) {
  if (std::isnan(x)) return x;
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

double next_down(double x) {
  if (std::isnan(x)) return x;
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

Interval Interval::whole() {
  return {-std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
}

namespace {

constexpr mpfr_prec_t kPrec = 128;

// chained directed rounding: each step rounds toward the requested side,
// so the final double brackets the exact value from that side
double q_to_double(const mpq_class& q, mpfr_rnd_t rnd) {
  mpfr_t t;
  mpfr_init2(t, kPrec);
  mpfr_set_q(t, q.get_mpq_t(), rnd);
  double r = mpfr_get_d(t, rnd);
  mpfr_clear(t);
  return r;
}

double log_abs_dir(const mpq_class& q, mpfr_rnd_t rnd) {
  mpfr_t t;
  mpfr_init2(t, kPrec);
  // |q| rounded toward the requested side; log is increasing, so the
  // direction is preserved through the chain
  mpfr_set_q(t, q.get_mpq_t(), mpq_sgn(q.get_mpq_t()) < 0
                                   ? (rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD)
                                   : rnd);
  mpfr_abs(t, t, MPFR_RNDN);  // exact
  mpfr_log(t, t, rnd);
  double r = mpfr_get_d(t, rnd);
  mpfr_clear(t);
  return r;
}

double log_abs_dir(const mpz_class& z, mpfr_rnd_t rnd) {
  mpfr_t t;
  mpfr_init2(t, kPrec);
  mpfr_set_z(t, z.get_mpz_t(), mpz_sgn(z.get_mpz_t()) < 0
                                   ? (rnd == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD)
                                   : rnd);
  mpfr_abs(t, t, MPFR_RNDN);
  mpfr_log(t, t, rnd);
  double r = mpfr_get_d(t, rnd);
  mpfr_clear(t);
  return r;
}

inline Interval repair(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi)) return Interval::whole();
  return {lo, hi};
}

// directed product of two endpoints; 0 * inf resolves to 0, which is the
// correct endpoint value for products of sets containing 0 and unbounded rays
double mul_dir(double a, double b, bool up) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double r = a * b;
  if (std::isnan(r)) return up ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
  return up ? next_up(r) : next_down(r);
}

}  // namespace

Interval Interval::exact(const mpq_class& q) {
  return repair(q_to_double(q, MPFR_RNDD), q_to_double(q, MPFR_RNDU));
}

Interval Interval::log_abs(const mpz_class& z) {
  if (z == 0) throw MathRefusal("log of zero");
  return repair(log_abs_dir(z, MPFR_RNDD), log_abs_dir(z, MPFR_RNDU));
}

Interval Interval::log_abs(const mpq_class& q) {
  if (q == 0) throw MathRefusal("log of zero");
  return repair(log_abs_dir(q, MPFR_RNDD), log_abs_dir(q, MPFR_RNDU));
}

Interval Interval::log_of(unsigned long n) { return log_abs(mpz_class(n)); }

bool Interval::is_finite() const {
  return std::isfinite(lo) && std::isfinite(hi);
}

double Interval::mid() const {
  if (!is_finite()) {
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return 0.0;
  }
  return lo + 0.5 * (hi - lo);
}

double Interval::width_up() const {
  double w = hi - lo;
  if (std::isnan(w)) return std::numeric_limits<double>::infinity();
  return next_up(w);
}

Interval Interval::operator+(const Interval& o) const {
  double l = lo + o.lo;
  double h = hi + o.hi;
  return repair(l == 0.0 ? 0.0 : next_down(l), h == 0.0 ? 0.0 : next_up(h));
}

Interval Interval::operator-(const Interval& o) const { return *this + (-o); }

Interval Interval::operator*(const Interval& o) const {
  double cl[4] = {mul_dir(lo, o.lo, false), mul_dir(lo, o.hi, false),
                  mul_dir(hi, o.lo, false), mul_dir(hi, o.hi, false)};
  double ch[4] = {mul_dir(lo, o.lo, true), mul_dir(lo, o.hi, true),
                  mul_dir(hi, o.lo, true), mul_dir(hi, o.hi, true)};
  double l = cl[0], h = ch[0];
  for (int i = 1; i < 4; i++) {
    if (cl[i] < l) l = cl[i];
    if (ch[i] > h) h = ch[i];
  }
  return repair(l, h);
}

Interval Interval::scaled(const mpq_class& c) const {
  return *this * Interval::exact(c);
}

Interval Interval::divided_by(const mpz_class& m) const {
  if (m <= 0) throw MathRefusal("nonpositive divisor");
  return scaled(make_q(1, m));
}

std::string Interval::str() const {
  char buf[80];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", lo, hi);
  return buf;
}

Interval hull(const Interval& a, const Interval& b) {
  return {a.lo < b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi};
}

bool width_within(const Interval& iv, const mpq_class& eps) {
  if (!iv.is_finite()) return false;
  return mpq_class(iv.hi) - mpq_class(iv.lo) <= eps;
}

}  // namespace divht
