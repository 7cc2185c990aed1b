#pragma once
#include <vector>

#include "divht/form.hpp"
#include "divht/interval.hpp"

namespace divht {

struct Place {
  bool finite = false;
  mpz_class p = 0;

  static Place archimedean() { return {}; }
  static Place at_prime(const mpz_class& prime);
  bool operator==(const Place& o) const {
    return finite == o.finite && p == o.p;
  }
  std::string str() const;
};

// value contained in iv; at a finite place the value is additionally an
// exact rational multiple of log p, value in [exp_lo, exp_hi] * log p
struct Enclosure {
  Interval iv;
  bool padic = false;
  mpz_class p = 0;
  mpq_class exp_lo = 0, exp_hi = 0;

  bool exact() const { return padic ? exp_lo == exp_hi : iv.lo == iv.hi; }
};

Enclosure enc_zero(const Place& v);
Enclosure enc_range(const Place& v, const mpq_class& exp_lo,
                    const mpq_class& exp_hi);        // finite places
Enclosure enc_interval(const Interval& iv);          // archimedean
Enclosure enc_log_abs(const mpq_class& x, const Place& v);  // log|x|_v
Enclosure enc_add(const Enclosure& a, const Enclosure& b);
Enclosure enc_scale(const Enclosure& a, const mpq_class& c);

mpz_class ord_at(const mpz_class& p, const mpz_class& z);    // z != 0
mpq_class ord_at_q(const mpz_class& p, const mpq_class& x);  // x != 0

// log of the v-adic sup norm of the coefficient vector / coordinates
Enclosure gauss_log_norm(const HomogeneousForm& phi, const Place& v);
Enclosure log_sup_point(const std::vector<mpq_class>& q, const Place& v);

// two-sided bound for the archimedean Mahler integral of a form, from its
// coefficient norms; exact for monomials
Interval mahler_bracket(const HomogeneousForm& phi);

// numerical torus average of log|phi|; diagnostic only, not certified
double mahler_estimate(const HomogeneousForm& phi);

// -log|Res f|_v + (N+1) d^N log||f||_v; invariant under scaling the lift
Enclosure lambda_hom(const PolyMap& f, const Place& v);

// archimedean constants of the evaluation estimates; depend on (N, d) only
struct EstimateConstants {
  mpz_class r = 0, s = 0;
  Interval c1, c3, c4;
};
EstimateConstants estimate_constants(int N, int d);

// per-place constants bounding one pushforward step of f (primitive
// integral); the deviation of escape from the Mahler proxy lies in
// [-c5, c6] * deg / (d^N (d-1)) at each step
struct PushTail {
  Enclosure c5, c6;
};
PushTail push_tail(const PolyMap& f, const Place& v);

int default_max_k(int N);

struct EscapeReport {
  Enclosure value;
  int k_used = 0;
  bool converged = false;
  bool cycle = false;          // exact value from a detected cycle
  std::vector<double> raw;     // per-step normalized sup-norm proxies
};

// escape rate of the point q under f at the place v
EscapeReport point_escape_rate(const PolyMap& f,
                               const std::vector<mpq_class>& q, const Place& v,
                               const mpq_class& eps, int max_k);

// escape rate of the divisor cut by phi under f at the place v
EscapeReport form_escape_rate(const PolyMap& f, const HomogeneousForm& phi,
                              const Place& v, const mpq_class& eps, int max_k);

// local pairing of the divisor cut by phi against the point q:
// -log|phi(q)|_v + G_v(phi) + deg(phi) G_v(q); refuses points on the divisor
EscapeReport green_pairing(const PolyMap& f, const HomogeneousForm& phi,
                           const std::vector<mpq_class>& q, const Place& v,
                           const mpq_class& eps, int max_k);

// escape rate of the jacobian divisor at infinity, shifted by -log d; the
// enclosure is rigorous for that quantity, its dynamical interpretation is
// only heuristic, hence certified = false
struct LyapunovReport {
  Interval greens;
  Interval value;
  bool certified = false;
  int k_used = 0;
  bool converged = false;
};
LyapunovReport lyapunov_estimate(const PolyMap& f, const mpq_class& eps,
                                 int max_k);

}  // namespace divht
