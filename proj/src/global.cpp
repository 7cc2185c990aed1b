#include "divht/global.hpp"

#include <algorithm>

#include "divht/errors.hpp"
#include "divht/local.hpp"
#include "divht/resultant.hpp"

namespace divht {

namespace {

// coprime integer lift with positive first nonzero coordinate
std::vector<mpz_class> primitive_lift(const std::vector<mpq_class>& q) {
  mpz_class l = 1;
  for (const auto& c : q) {
    mpz_class den = c.get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
  }
  std::vector<mpz_class> nums;
  nums.reserve(q.size());
  mpz_class g = 0;
  for (const auto& c : q) {
    mpz_class n = c.get_num() * (l / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    nums.push_back(std::move(n));
  }
  if (g == 0) throw MathRefusal("projective point cannot be zero");
  for (const auto& n : nums)
    if (n != 0) {
      if (n < 0) g = -g;
      break;
    }
  for (auto& n : nums) n /= g;
  return nums;
}

mpz_class sup_abs(const std::vector<mpz_class>& z) {
  mpz_class m = 0;
  for (const auto& c : z) {
    mpz_class a = abs(c);
    if (a > m) m = a;
  }
  return m;
}

Interval log_plus(const mpz_class& n) {
  if (n <= 1) return Interval::point(0.0);
  return Interval::log_abs(n);
}

Interval bracket_between(const Interval& lo_part, const Interval& hi_part) {
  return {lo_part.lo, hi_part.hi};
}

Interval max_of(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// iterates beyond this coefficient size are not worth certifying
constexpr std::size_t kCoeffBitCap = 40000000;

bool too_large(const mpz_class& z) {
  return mpz_sizeinbase(z.get_mpz_t(), 2) > kCoeffBitCap;
}

}  // namespace

Interval weil_height_point(const std::vector<mpq_class>& q) {
  return Interval::log_abs(sup_abs(primitive_lift(q)));
}

Interval weil_height_map(const PolyMap& f) {
  PrimitiveMap pm = primitive_map(f);
  return Interval::log_abs(map_max_abs_coeff(pm.map));
}

Interval philippon_height(const HomogeneousForm& phi) {
  if (phi.is_zero()) throw MathRefusal("height of the zero form");
  return mahler_bracket(primitive_part(phi).form);
}

ErrorBudget error_budget(const PolyMap& f) {
  if (f.d < 2) throw MathRefusal("error budget needs map degree at least 2");
  PrimitiveMap pm = primitive_map(f);
  if (resultant(pm.map) == 0)
    throw MathRefusal("not a morphism: resultant vanishes");
  ErrorBudget eb;
  eb.N = f.N;
  eb.d = f.d;
  eb.h = weil_height_map(f);
  EstimateConstants ec = estimate_constants(f.N, f.d);
  mpz_class dn = pow_z(f.d, f.N);
  mpz_class dn1 = dn * f.d;
  mpz_class dn2 = dn1 * f.d;
  Interval log2 = Interval::log_of(2);
  mpq_class over(1, f.d - 1);
  eb.c8 = (ec.c3 + log2.scaled(mpz_class(f.N) * f.d)).scaled(over);
  eb.c9 = (log2.scaled(mpz_class(f.N) * (dn2 + 1)) +
           (ec.c3 + ec.c4).scaled(dn1 - 1) +
           log_plus(f.d + 1).scaled(f.N))
              .scaled(over);
  mpq_class a8 = make_q((f.N + 1) * dn - 1, f.d - 1);
  mpq_class a9 = make_q((f.N + 1) * dn * (dn1 - 1) + 1, f.d - 1);
  eb.b_upper = eb.h.scaled(a8) + eb.c8;
  eb.b_lower = eb.h.scaled(a9) + eb.c9;
  eb.refined = max_of(eb.b_upper, eb.b_lower);
  eb.C1 = mpz_class(5) * f.N * dn1;
  mpz_class expo = mpz_class(f.N) * (mpz_class(1) << (f.N + 4)) * dn;
  if (!expo.fits_ulong_p()) throw MathRefusal("constants out of range");
  eb.C2 = pow_z(3, f.N) * pow_z(f.N, f.N + 1) *
          pow_z(2 * f.d, expo.get_ui());
  eb.log_C2 = Interval::log_abs(eb.C2);
  eb.coarse = eb.h.scaled(mpq_class(eb.C1)) + Interval::exact(mpq_class(eb.C2));
  return eb;
}

DivisorHeightReport canonical_height_divisor(const PolyMap& f,
                                             const HomogeneousForm& phi,
                                             const mpq_class& eps, int max_k) {
  if (f.d < 2) throw MathRefusal("dynamics needs map degree at least 2");
  if (phi.is_zero()) throw MathRefusal("height of the zero form");
  if (phi.num_vars() != f.N + 1) throw MathRefusal("form dimension mismatch");
  if (eps <= 0) throw MathRefusal("eps must be positive");
  if (max_k < 0) max_k = default_max_k(f.N);
  PrimitiveMap pm = primitive_map(f);
  const PolyMap& g = pm.map;

  DivisorHeightReport rep;
  rep.budget = error_budget(f);
  rep.naive = philippon_height(phi);
  rep.degree = phi.degree();
  rep.canonical.width_target = Interval::exact(eps).hi;
  long e = phi.degree();
  if (e == 0) {
    rep.canonical.value = Interval::point(0.0);
    rep.canonical.converged = true;
    rep.canonical.raw.push_back(0.0);
    rep.consistent_with_zero = true;
    return rep;
  }

  mpz_class dN = pow_z(f.d, f.N);
  HomogeneousForm cur = primitive_part(phi).form;
  std::vector<HomogeneousForm> history;
  mpq_class dnk = 1;  // d^{-kN}
  mpq_class dk = 1;   // d^{-k}
  for (int k = 0;; k++) {
    Interval bracket = mahler_bracket(cur).scaled(dnk);
    mpq_class sc = mpq_class(e) * dk;
    Interval tail = bracket_between(rep.budget.b_lower.scaled(-sc),
                                    rep.budget.b_upper.scaled(sc));
    rep.canonical.value = bracket + tail;
    rep.canonical.raw.push_back(
        Interval::log_abs(cur.max_abs_coeff()).scaled(dnk).mid());
    rep.canonical.k_used = k;
    if (width_within(rep.canonical.value, eps)) {
      rep.canonical.converged = true;
      break;
    }
    if (k >= max_k) break;

    bool repeated = false;
    for (const auto& past : history)
      if (past == cur) {
        // the divisor orbit is preperiodic, so the height is exactly zero
        rep.canonical.value = Interval::point(0.0);
        rep.canonical.k_used = k;
        rep.canonical.converged = true;
        rep.canonical.cycle = true;
        repeated = true;
        break;
      }
    if (repeated) break;
    history.push_back(cur);

    if (f.N >= 2 && mpz_class(cur.degree()) * dN > 40) break;
    if (too_large(cur.max_abs_coeff().get_num())) break;

    DivisorStep step = push_divisor(g, cur);
    cur = std::move(step.next);
    dnk /= mpq_class(dN);
    dk /= f.d;
  }
  rep.canonical.width = rep.canonical.value.width_up();
  rep.consistent_with_zero = rep.canonical.value.contains_zero();
  return rep;
}

HeightReport canonical_height_point(const PolyMap& f,
                                    const std::vector<mpq_class>& q,
                                    const mpq_class& eps, int max_k) {
  if (f.d < 2) throw MathRefusal("dynamics needs map degree at least 2");
  if (static_cast<int>(q.size()) != f.N + 1)
    throw MathRefusal("point dimension mismatch");
  if (eps <= 0) throw MathRefusal("eps must be positive");
  if (max_k < 0) max_k = default_max_k(f.N);
  PrimitiveMap pm = primitive_map(f);
  const PolyMap& g = pm.map;
  if (resultant(g) == 0)
    throw MathRefusal("not a morphism: resultant vanishes");

  Interval h = weil_height_map(f);
  EstimateConstants ec = estimate_constants(f.N, f.d);
  mpz_class dn = pow_z(f.d, f.N);
  mpq_class over(1, f.d - 1);
  Interval tail = bracket_between(
      (ec.c3 + h.scaled(mpq_class((f.N + 1) * dn))).scaled(-over),
      ec.c4.scaled(over));
  Interval hover = h.scaled(over);

  HeightReport rep;
  rep.width_target = Interval::exact(eps).hi;
  std::vector<mpz_class> cur = primitive_lift(q);
  std::vector<std::vector<mpz_class>> history;
  mpq_class dk = 1;
  for (int k = 0;; k++) {
    Interval supk = Interval::log_abs(sup_abs(cur));
    rep.value = (supk + hover + tail).scaled(dk);
    rep.raw.push_back(supk.scaled(dk).mid());
    rep.k_used = k;
    if (width_within(rep.value, eps)) {
      rep.converged = true;
      break;
    }
    if (k >= max_k) break;

    bool repeated = false;
    for (const auto& past : history)
      if (past == cur) {
        // preperiodic orbit forces the canonical height to vanish
        rep.value = Interval::point(0.0);
        rep.k_used = k;
        rep.converged = true;
        rep.cycle = true;
        repeated = true;
        break;
      }
    if (repeated) break;
    history.push_back(cur);
    if (too_large(sup_abs(cur))) break;

    std::vector<mpq_class> curq(cur.begin(), cur.end());
    cur = primitive_lift(evaluate(g, curq));
    dk /= f.d;
  }
  rep.width = rep.value.width_up();
  return rep;
}

DivisorHeightReport critical_height(const PolyMap& f, const mpq_class& eps,
                                    int max_k) {
  HomogeneousForm jac = jacobian_form(f);
  if (jac.is_zero()) throw MathRefusal("jacobian vanishes identically");
  return canonical_height_divisor(f, jac, eps, max_k);
}

TheoremCheck theorem1_check(const PolyMap& f, const HomogeneousForm& phi) {
  TheoremCheck chk;
  chk.report = canonical_height_divisor(f, phi, make_q(1, 8));
  mpq_class e(chk.report.degree);
  chk.diff = chk.report.canonical.value - chk.report.naive;
  chk.refined_hi = chk.report.budget.b_upper.scaled(e);
  chk.refined_lo = chk.report.budget.b_lower.scaled(-e);
  chk.coarse = chk.report.budget.coarse.scaled(e);
  chk.ok_refined =
      !(chk.diff.lo > chk.refined_hi.hi || chk.diff.hi < chk.refined_lo.lo);
  double mag = std::max(chk.diff.lo, -chk.diff.hi);  // proven |diff| lower bound
  chk.ok_coarse = !(mag > chk.coarse.hi);
  chk.ok = chk.ok_refined && chk.ok_coarse;
  return chk;
}

}  // namespace divht
