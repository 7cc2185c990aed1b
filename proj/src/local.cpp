#include "divht/local.hpp"

#include <cmath>
#include <complex>

#include "divht/errors.hpp"
#include "divht/resultant.hpp"

namespace divht {

Place Place::at_prime(const mpz_class& prime) {
  if (prime < 2 || !mpz_probab_prime_p(prime.get_mpz_t(), 40))
    throw MathRefusal("finite place must be a prime");
  Place v;
  v.finite = true;
  v.p = prime;
  return v;
}

std::string Place::str() const { return finite ? p.get_str() : "inf"; }

Enclosure enc_zero(const Place& v) {
  Enclosure e;
  e.padic = v.finite;
  e.p = v.p;
  return e;
}

Enclosure enc_range(const Place& v, const mpq_class& exp_lo,
                    const mpq_class& exp_hi) {
  if (!v.finite) throw InternalError("exponent range needs a finite place");
  if (exp_lo > exp_hi) throw InternalError("empty exponent range");
  Enclosure e;
  e.padic = true;
  e.p = v.p;
  e.exp_lo = exp_lo;
  e.exp_hi = exp_hi;
  e.iv = hull(Interval::exact(exp_lo), Interval::exact(exp_hi)) *
         Interval::log_abs(v.p);
  return e;
}

Enclosure enc_interval(const Interval& iv) {
  Enclosure e;
  e.iv = iv;
  return e;
}

Enclosure enc_log_abs(const mpq_class& x, const Place& v) {
  if (x == 0) throw MathRefusal("log of zero");
  if (v.finite) {
    mpq_class o = -ord_at_q(v.p, x);
    return enc_range(v, o, o);
  }
  return enc_interval(Interval::log_abs(x));
}

Enclosure enc_add(const Enclosure& a, const Enclosure& b) {
  if (a.padic != b.padic || (a.padic && a.p != b.p))
    throw InternalError("enclosure place mismatch");
  Enclosure e;
  e.padic = a.padic;
  e.p = a.p;
  e.iv = a.iv + b.iv;
  if (e.padic) {
    e.exp_lo = a.exp_lo + b.exp_lo;
    e.exp_hi = a.exp_hi + b.exp_hi;
  }
  return e;
}

Enclosure enc_scale(const Enclosure& a, const mpq_class& c) {
  Enclosure e = a;
  e.iv = a.iv.scaled(c);
  if (e.padic) {
    e.exp_lo = a.exp_lo * c;
    e.exp_hi = a.exp_hi * c;
    if (c < 0) std::swap(e.exp_lo, e.exp_hi);
  }
  return e;
}

mpz_class ord_at(const mpz_class& p, const mpz_class& z) {
  if (z == 0) throw MathRefusal("order of zero");
  mpz_class rest;
  mp_bitcnt_t o = mpz_remove(rest.get_mpz_t(), z.get_mpz_t(), p.get_mpz_t());
  return mpz_class(static_cast<unsigned long>(o));
}

mpq_class ord_at_q(const mpz_class& p, const mpq_class& x) {
  if (x == 0) throw MathRefusal("order of zero");
  return mpq_class(ord_at(p, x.get_num())) - mpq_class(ord_at(p, x.get_den()));
}

namespace {

// least p-adic order over the coefficients of every component
mpq_class min_coeff_ord(const PolyMap& f, const mpz_class& p) {
  bool first = true;
  mpq_class m = 0;
  for (const auto& comp : f.comps)
    for (const auto& [mono, c] : comp.terms()) {
      (void)mono;
      mpq_class o = ord_at_q(p, c);
      if (first || o < m) m = o;
      first = false;
    }
  if (first) throw MathRefusal("zero map");
  return m;
}

Interval log_plus(const mpz_class& n) {
  if (n <= 1) return Interval::point(0.0);
  return Interval::log_abs(n);
}

// interval whose endpoints come from two separate enclosing intervals
Interval bracket_between(const Interval& lo_part, const Interval& hi_part) {
  return {lo_part.lo, hi_part.hi};
}

}  // namespace

Enclosure gauss_log_norm(const HomogeneousForm& phi, const Place& v) {
  if (phi.is_zero()) throw MathRefusal("norm of the zero form");
  if (v.finite) {
    bool first = true;
    mpq_class m = 0;
    for (const auto& [mono, c] : phi.terms()) {
      (void)mono;
      mpq_class o = ord_at_q(v.p, c);
      if (first || o < m) m = o;
      first = false;
    }
    return enc_range(v, -m, -m);
  }
  return enc_interval(Interval::log_abs(phi.max_abs_coeff()));
}

Enclosure log_sup_point(const std::vector<mpq_class>& q, const Place& v) {
  if (v.finite) {
    bool first = true;
    mpq_class m = 0;
    for (const auto& c : q) {
      if (c == 0) continue;
      mpq_class o = ord_at_q(v.p, c);
      if (first || o < m) m = o;
      first = false;
    }
    if (first) throw MathRefusal("norm of the zero point");
    return enc_range(v, -m, -m);
  }
  mpq_class m = 0;
  for (const auto& c : q) {
    mpq_class a = abs(c);
    if (a > m) m = a;
  }
  if (m == 0) throw MathRefusal("norm of the zero point");
  return enc_interval(Interval::log_abs(m));
}

Interval mahler_bracket(const HomogeneousForm& phi) {
  if (phi.is_zero()) throw MathRefusal("mahler measure of the zero form");
  if (phi.is_monomial()) {
    const auto& lead = phi.leading();
    return Interval::log_abs(lead.second);
  }
  int n = phi.num_vars() - 1;
  long e = phi.degree();
  Interval l1 = Interval::log_abs(phi.l1_norm());
  Interval sup = Interval::log_abs(phi.max_abs_coeff());
  Interval drop = Interval::log_of(2).scaled(mpq_class(n) * e);
  Interval lift =
      Interval::log_of(static_cast<unsigned long>(e + 1)).scaled(make_q(n, 2));
  double lo = (l1 - drop).lo;
  double hi = l1.hi;
  double hi2 = (sup + lift).hi;
  if (hi2 < hi) hi = hi2;
  return {lo, hi};
}

double mahler_estimate(const HomogeneousForm& phi) {
  if (phi.is_zero()) throw MathRefusal("mahler measure of the zero form");
  using cd = std::complex<double>;
  if (phi.num_vars() == 2) {
    // Jensen: log of the leading coefficient plus log+ of each root of the
    // dehomogenization (factors of either variable contribute nothing)
    long e = phi.degree();
    std::vector<cd> c(e + 1, 0.0);
    for (const auto& [m, q] : phi.terms()) c[m[0]] = q.get_d();
    long lo = 0, hi = e;
    while (std::abs(c[hi]) == 0.0) hi--;
    while (std::abs(c[lo]) == 0.0) lo++;
    std::vector<cd> p(c.begin() + lo, c.begin() + hi + 1);
    long deg = hi - lo;
    double acc = std::log(std::abs(p[deg]));
    if (deg > 0) {
      std::vector<cd> z(deg);
      cd seed(0.4, 0.9);
      z[0] = seed;
      for (long i = 1; i < deg; i++) z[i] = z[i - 1] * seed;
      for (int it = 0; it < 400; it++) {
        double moved = 0;
        for (long i = 0; i < deg; i++) {
          cd val = p[deg];
          for (long j = deg - 1; j >= 0; j--) val = val * z[i] + p[j];
          cd den = p[deg];
          for (long j = 0; j < deg; j++)
            if (j != i) den *= z[i] - z[j];
          if (std::abs(den) == 0.0) continue;
          cd delta = val / den;
          z[i] -= delta;
          moved += std::abs(delta);
        }
        if (moved < 1e-14) break;
      }
      for (long i = 0; i < deg; i++) {
        double a = std::abs(z[i]);
        if (a > 1.0) acc += std::log(a);
      }
    }
    return acc;
  }
  // torus average over a uniform angular grid, first coordinate pinned to 1
  int n = phi.num_vars() - 1;
  long steps = n >= 3 ? 48 : 768;
  double total = 0;
  long count = 0;
  std::vector<cd> pt(phi.num_vars());
  pt[0] = 1.0;
  std::vector<long> idx(n, 0);
  for (;;) {
    for (int i = 0; i < n; i++) {
      double th = 2 * 3.14159265358979323846 * (idx[i] + 0.5) / steps;
      pt[i + 1] = cd(std::cos(th), std::sin(th));
    }
    cd val = 0.0;
    for (const auto& [m, q] : phi.terms()) {
      cd t = q.get_d();
      for (std::size_t i = 0; i < pt.size(); i++)
        for (int ee = 0; ee < m[i]; ee++) t *= pt[i];
      val += t;
    }
    double a = std::abs(val);
    if (a > 0) {
      total += std::log(a);
      count++;
    }
    int carry = 0;
    while (carry < n && ++idx[carry] == steps) {
      idx[carry] = 0;
      carry++;
    }
    if (carry == n) break;
  }
  return count ? total / count : 0.0;
}

Enclosure lambda_hom(const PolyMap& f, const Place& v) {
  mpq_class res = resultant(f);
  if (res == 0) throw MathRefusal("not a morphism: resultant vanishes");
  mpz_class w = mpz_class(f.N + 1) * pow_z(f.d, f.N);
  if (v.finite) {
    mpq_class e = ord_at_q(v.p, res) - mpq_class(w) * min_coeff_ord(f, v.p);
    return enc_range(v, e, e);
  }
  Interval iv = -Interval::log_abs(res) +
                Interval::log_abs(map_max_abs_coeff(f)).scaled(mpq_class(w));
  return enc_interval(iv);
}

EstimateConstants estimate_constants(int N, int d) {
  if (N < 1 || d < 2) throw MathRefusal("constants need N >= 1, d >= 2");
  EstimateConstants ec;
  mpz_class dp1n = pow_z(d + 1, N);
  mpz_class dn = pow_z(d, N);
  mpz_class outer = (N + 1) * dp1n;
  if (!outer.fits_ulong_p()) throw MathRefusal("constants out of range");
  ec.r = outer * pow_z(dn + 1, outer.get_ui());
  ec.s = pow_z((N + 1) * (d - 1) + 2, N);
  if (!ec.s.fits_ulong_p() || ec.s > 2000000)
    throw MathRefusal("constants out of range");
  unsigned long su = ec.s.get_ui();
  mpz_class inner = (mpz_class(1) << (su + 1)) * ec.r * pow_z(ec.s, su);
  ec.c1 = Interval::log_abs(inner).scaled(mpq_class(ec.r));
  ec.c3 = log_plus(N + 1) + log_plus(N * (d - 1) + 1).scaled(N) +
          log_plus((N + 1) * dn).scaled(mpq_class(dp1n)) + ec.c1;
  ec.c4 = log_plus(d + 1).scaled(N);
  return ec;
}

PushTail push_tail(const PolyMap& f, const Place& v) {
  PrimitiveMap pm = primitive_map(f);
  const PolyMap& g = pm.map;
  mpq_class res = resultant(g);
  if (res == 0) throw MathRefusal("not a morphism: resultant vanishes");
  mpz_class dn = pow_z(g.d, g.N);
  mpz_class dn1 = dn * g.d;
  PushTail t;
  if (v.finite) {
    mpq_class lam(ord_at(v.p, res.get_num()));
    mpq_class c5e = mpq_class(dn * (dn1 - 1)) * lam;
    mpq_class c6e = mpq_class(dn) * lam;
    t.c5 = enc_range(v, c5e, c5e);
    t.c6 = enc_range(v, c6e, c6e);
    return t;
  }
  EstimateConstants ec = estimate_constants(g.N, g.d);
  Interval lam = lambda_hom(g, v).iv;
  Interval fsup = Interval::log_abs(map_max_abs_coeff(g));
  Interval log2 = Interval::log_of(2);
  mpz_class dn2 = dn1 * g.d;
  Interval c5 = lam.scaled(mpq_class(dn * (dn1 - 1))) +
                log2.scaled(mpq_class(g.N * dn * (dn2 + 1))) +
                (ec.c3 + ec.c4).scaled(mpq_class(dn * (dn1 - 1))) +
                fsup.scaled(mpq_class(dn)) +
                log_plus(g.d + 1).scaled(mpq_class(g.N * dn));
  Interval c6 = lam.scaled(mpq_class(dn)) - fsup.scaled(mpq_class(dn)) +
                ec.c3.scaled(mpq_class(dn)) +
                log2.scaled(mpq_class(g.N * dn1));
  t.c5 = enc_interval(c5);
  t.c6 = enc_interval(c6);
  return t;
}

int default_max_k(int N) { return N == 1 ? 24 : 8; }

namespace {

// q = gamma * out with out integral, coprime, first nonzero entry positive
mpq_class normalize_point(const std::vector<mpq_class>& q,
                          std::vector<mpz_class>& out) {
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
  out.clear();
  out.reserve(nums.size());
  for (auto& n : nums) out.push_back(mpz_class(n / g));
  return make_q(g, l);
}

mpz_class sup_abs(const std::vector<mpz_class>& z) {
  mpz_class m = 0;
  for (const auto& c : z) {
    mpz_class a = abs(c);
    if (a > m) m = a;
  }
  return m;
}

}  // namespace

EscapeReport point_escape_rate(const PolyMap& f,
                               const std::vector<mpq_class>& q, const Place& v,
                               const mpq_class& eps, int max_k) {
  if (f.d < 2) throw MathRefusal("dynamics needs map degree at least 2");
  if (static_cast<int>(q.size()) != f.N + 1)
    throw MathRefusal("point dimension mismatch");
  if (max_k < 0) max_k = default_max_k(f.N);
  PrimitiveMap pm = primitive_map(f);
  const PolyMap& g = pm.map;
  mpq_class res = resultant(g);
  if (res == 0) throw MathRefusal("not a morphism: resultant vanishes");

  std::vector<mpz_class> cur;
  mpq_class lift = normalize_point(q, cur);
  Enclosure base = enc_log_abs(lift, v);
  if (pm.scalar != 1)
    base = enc_add(base,
                   enc_scale(enc_log_abs(pm.scalar, v), make_q(1, f.d - 1)));

  mpq_class lam_exp = 0;
  Interval tail_arch, fsup_over;
  if (v.finite) {
    lam_exp = mpq_class(ord_at(v.p, res.get_num()));
  } else {
    EstimateConstants ec = estimate_constants(f.N, f.d);
    Interval lam = lambda_hom(g, v).iv;
    tail_arch = bracket_between((ec.c3 + lam).scaled(make_q(-1, f.d - 1)),
                                ec.c4.scaled(make_q(1, f.d - 1)));
    fsup_over =
        Interval::log_abs(map_max_abs_coeff(g)).scaled(make_q(1, f.d - 1));
  }

  EscapeReport rep;
  Enclosure ledger = enc_zero(v);
  std::vector<std::vector<mpz_class>> history;
  std::vector<Enclosure> ledger_at;
  std::vector<mpq_class> gammas;
  mpq_class dpow = 1;  // d^{-k}
  for (int k = 0;; k++) {
    Enclosure val = enc_add(base, ledger);
    double raw = base.iv.mid() + ledger.iv.mid();
    if (v.finite) {
      val = enc_add(val,
                    enc_range(v, -lam_exp * dpow / (f.d - 1), mpq_class(0)));
    } else {
      Interval supk = Interval::log_abs(sup_abs(cur));
      val = enc_add(val,
                    enc_interval((supk + fsup_over + tail_arch).scaled(dpow)));
      raw += supk.scaled(dpow).mid();
    }
    rep.raw.push_back(raw);
    rep.value = val;
    rep.k_used = k;
    if (width_within(val.iv, eps)) {
      rep.converged = true;
      return rep;
    }
    if (k >= max_k) return rep;

    // exact resummation once the primitive orbit repeats
    for (std::size_t j = 0; j < history.size(); j++)
      if (history[j] == cur) {
        int m = k - static_cast<int>(j);
        mpz_class dm = pow_z(f.d, m);
        Enclosure s = enc_zero(v);
        mpq_class w = make_q(1, f.d);
        for (std::size_t i = j; i < gammas.size(); i++) {
          if (gammas[i] != 1)
            s = enc_add(s, enc_scale(enc_log_abs(gammas[i], v), w));
          w /= f.d;
        }
        Enclosure cyc = enc_scale(
            s, make_q(dm, dm - 1) /
                   mpq_class(pow_z(f.d, static_cast<unsigned long>(j))));
        rep.value = enc_add(base, enc_add(ledger_at[j], cyc));
        rep.k_used = k;
        rep.converged = true;
        rep.cycle = true;
        return rep;
      }
    history.push_back(cur);
    ledger_at.push_back(ledger);

    std::vector<mpq_class> curq(cur.begin(), cur.end());
    std::vector<mpq_class> nextq = evaluate(g, curq);
    std::vector<mpz_class> next;
    mpq_class gam = normalize_point(nextq, next);
    gammas.push_back(gam);
    if (gam != 1)
      ledger = enc_add(ledger,
                       enc_scale(enc_log_abs(gam, v), dpow * make_q(1, f.d)));
    cur = std::move(next);
    dpow /= f.d;
  }
}

EscapeReport form_escape_rate(const PolyMap& f, const HomogeneousForm& phi,
                              const Place& v, const mpq_class& eps,
                              int max_k) {
  if (f.d < 2) throw MathRefusal("dynamics needs map degree at least 2");
  if (phi.is_zero()) throw MathRefusal("escape rate of the zero form");
  if (phi.num_vars() != f.N + 1) throw MathRefusal("form dimension mismatch");
  if (max_k < 0) max_k = default_max_k(f.N);
  PrimitiveMap pm = primitive_map(f);
  const PolyMap& g = pm.map;
  if (resultant(g) == 0)
    throw MathRefusal("not a morphism: resultant vanishes");
  long e = phi.degree();
  PrimitiveForm pw = primitive_part(phi);

  Enclosure base = enc_log_abs(pw.scalar, v);
  if (pm.scalar != 1 && e > 0)
    base = enc_add(
        base, enc_scale(enc_log_abs(pm.scalar, v), make_q(-e, f.d - 1)));
  EscapeReport rep;
  if (e == 0) {
    rep.value = base;
    rep.raw.push_back(base.iv.mid());
    rep.converged = true;
    return rep;
  }

  PushTail pt = push_tail(g, v);
  mpz_class dN = pow_z(f.d, f.N);
  mpz_class dN1 = dN * f.d;

  Enclosure ledger = enc_zero(v);
  HomogeneousForm cur = pw.form;
  std::vector<HomogeneousForm> history;
  std::vector<Enclosure> ledger_at;
  std::vector<mpq_class> scalars;
  mpq_class dnk = 1;  // d^{-kN}
  mpq_class dk = 1;   // d^{-k}
  for (int k = 0;; k++) {
    mpq_class tail_scale = mpq_class(e) * dk / (mpq_class(dN) * (f.d - 1));
    Enclosure val = enc_add(base, ledger);
    double raw = base.iv.mid() + ledger.iv.mid();
    if (v.finite) {
      val = enc_add(val, enc_range(v, -pt.c5.exp_hi * tail_scale,
                                   pt.c6.exp_hi * tail_scale));
    } else {
      Interval m = mahler_bracket(cur).scaled(dnk);
      Interval tail = bracket_between(pt.c5.iv.scaled(-tail_scale),
                                      pt.c6.iv.scaled(tail_scale));
      val = enc_add(val, enc_interval(m + tail));
      raw += Interval::log_abs(cur.max_abs_coeff()).scaled(dnk).mid();
    }
    rep.raw.push_back(raw);
    rep.value = val;
    rep.k_used = k;
    if (width_within(val.iv, eps)) {
      rep.converged = true;
      return rep;
    }
    if (k >= max_k) return rep;

    // exact resummation once the primitive divisor orbit repeats
    for (std::size_t j = 0; j < history.size(); j++)
      if (history[j] == cur) {
        int m = k - static_cast<int>(j);
        mpz_class dmn = pow_z(f.d, static_cast<unsigned long>(m) * f.N);
        Enclosure s = enc_zero(v);
        mpq_class w = make_q(1, dN1);
        mpq_class stepw = make_q(1, dN);
        for (std::size_t i = j; i < scalars.size(); i++) {
          if (scalars[i] != 1)
            s = enc_add(s, enc_scale(enc_log_abs(scalars[i], v), w));
          w *= stepw;
        }
        mpq_class djn(pow_z(f.d, static_cast<unsigned long>(j) * f.N));
        Enclosure cyc = enc_scale(s, make_q(dmn, dmn - 1) / djn);
        rep.value = enc_add(base, enc_add(ledger_at[j], cyc));
        rep.k_used = k;
        rep.converged = true;
        rep.cycle = true;
        return rep;
      }
    history.push_back(cur);
    ledger_at.push_back(ledger);

    // keep elimination sizes sane away from the line case
    if (f.N >= 2 && mpz_class(cur.degree()) * dN > 40) return rep;

    DivisorStep step = push_divisor(g, cur);
    scalars.push_back(step.scalar);
    if (step.scalar != 1)
      ledger = enc_add(ledger, enc_scale(enc_log_abs(step.scalar, v),
                                         dnk / mpq_class(dN1)));
    cur = std::move(step.next);
    dnk /= mpq_class(dN);
    dk /= f.d;
  }
}

EscapeReport green_pairing(const PolyMap& f, const HomogeneousForm& phi,
                           const std::vector<mpq_class>& q, const Place& v,
                           const mpq_class& eps, int max_k) {
  if (phi.degree() < 1)
    throw MathRefusal("pairing needs a positive-degree divisor");
  if (phi.num_vars() != f.N + 1) throw MathRefusal("form dimension mismatch");
  mpq_class at = phi.evaluate(q);
  if (at == 0) throw MathRefusal("point lies on the divisor");
  long e = phi.degree();
  mpq_class eps_form = eps * make_q(2, 5);
  mpq_class eps_point = eps * make_q(2, 5 * e);
  EscapeReport fr = form_escape_rate(f, phi, v, eps_form, max_k);
  EscapeReport pr = point_escape_rate(f, q, v, eps_point, max_k);
  EscapeReport rep;
  rep.value = enc_add(enc_scale(enc_log_abs(at, v), -1),
                      enc_add(fr.value, enc_scale(pr.value, e)));
  rep.k_used = std::max(fr.k_used, pr.k_used);
  rep.converged = fr.converged && pr.converged;
  rep.cycle = fr.cycle || pr.cycle;
  rep.raw.push_back(-enc_log_abs(at, v).iv.mid() + fr.raw.back() +
                    e * pr.raw.back());
  return rep;
}

LyapunovReport lyapunov_estimate(const PolyMap& f, const mpq_class& eps,
                                 int max_k) {
  HomogeneousForm jac = jacobian_form(f);
  if (jac.is_zero()) throw MathRefusal("jacobian vanishes identically");
  EscapeReport er = form_escape_rate(f, jac, Place::archimedean(), eps, max_k);
  LyapunovReport rep;
  rep.greens = er.value.iv;
  rep.value = rep.greens - Interval::log_of(static_cast<unsigned long>(f.d));
  rep.k_used = er.k_used;
  rep.converged = er.converged;
  return rep;
}

}  // namespace divht
