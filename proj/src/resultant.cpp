#include "divht/resultant.hpp"

#include <algorithm>
#include <map>

#include "divht/errors.hpp"
#include "divht/interval.hpp"

namespace divht {

namespace {

void enumerate_degree(int nvars, int deg, Monomial& cur, int pos,
                      std::vector<Monomial>& out) {
  if (pos == nvars - 1) {
    cur[pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int e = deg; e >= 0; e--) {
    cur[pos] = e;
    enumerate_degree(nvars, deg - e, cur, pos + 1, out);
  }
}

std::vector<Monomial> monomials_of_degree(int nvars, int deg) {
  std::vector<Monomial> out;
  Monomial cur(nvars, 0);
  enumerate_degree(nvars, deg, cur, 0, out);
  std::sort(out.begin(), out.end(), LexGreater());
  return out;
}

}  // namespace

int MacaulayLayout::col_index(const Monomial& m) const {
  auto it = std::lower_bound(cols.begin(), cols.end(), m, LexGreater());
  if (it == cols.end() || *it != m) return -1;
  return static_cast<int>(it - cols.begin());
}

MacaulayLayout macaulay_layout(const std::vector<int>& degrees) {
  MacaulayLayout L;
  L.nvars = static_cast<int>(degrees.size());
  L.degrees = degrees;
  L.t = 1;
  for (int d : degrees) {
    if (d < 1) throw MathRefusal("resultant degrees must be positive");
    L.t += d - 1;
  }
  L.cols = monomials_of_degree(L.nvars, L.t);
  L.col_class.reserve(L.cols.size());
  L.multiplier.reserve(L.cols.size());
  L.reduced.reserve(L.cols.size());
  for (std::size_t j = 0; j < L.cols.size(); j++) {
    const Monomial& m = L.cols[j];
    int cls = -1, hits = 0;
    for (int i = 0; i < L.nvars; i++)
      if (m[i] >= degrees[i]) {
        if (cls < 0) cls = i;
        hits++;
      }
    if (cls < 0) throw InternalError("macaulay column without a class");
    L.col_class.push_back(cls);
    Monomial u = m;
    u[cls] -= degrees[cls];
    L.multiplier.push_back(u);
    L.reduced.push_back(hits == 1 ? 1 : 0);
    if (hits != 1) L.minor_idx.push_back(static_cast<int>(j));
  }
  return L;
}

ZMatrix macaulay_matrix(const MacaulayLayout& L,
                        const std::vector<HomogeneousForm>& forms) {
  if (static_cast<int>(forms.size()) != L.nvars)
    throw InternalError("macaulay matrix needs nvars forms");
  std::size_t n = L.cols.size();
  ZMatrix a(n, std::vector<mpz_class>(n, 0));
  Monomial prod(L.nvars);
  for (std::size_t r = 0; r < n; r++) {
    const HomogeneousForm& g = forms[L.col_class[r]];
    if (!g.is_integral()) throw InternalError("macaulay matrix needs integers");
    const Monomial& u = L.multiplier[r];
    for (const auto& [m, c] : g.terms()) {
      for (int i = 0; i < L.nvars; i++) prod[i] = u[i] + m[i];
      int j = L.col_index(prod);
      if (j < 0) throw InternalError("macaulay column lookup failed");
      a[r][j] += c.get_num();
    }
  }
  return a;
}

namespace {

ZMatrix minor_of(const ZMatrix& a, const std::vector<int>& idx) {
  ZMatrix m(idx.size(), std::vector<mpz_class>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); i++)
    for (std::size_t j = 0; j < idx.size(); j++) m[i][j] = a[idx[i]][idx[j]];
  return m;
}

PolyMap shear_map(int nvars, int i, int j, int c) {
  std::vector<HomogeneousForm> comps;
  comps.reserve(nvars);
  for (int k = 0; k < nvars; k++) {
    HomogeneousForm f = HomogeneousForm::variable(nvars, k);
    if (k == i) {
      Monomial m(nvars, 0);
      m[j] = 1;
      f.add_term(m, c);
    }
    comps.push_back(std::move(f));
  }
  return make_map(std::move(comps));
}

// Res(G) for primitive integral forms; resolves vanishing minors with
// unimodular shears, falling back to a gcd over form orderings
mpz_class resultant_core(const std::vector<HomogeneousForm>& forms,
                         const std::vector<int>& degrees) {
  int nvars = static_cast<int>(degrees.size());
  {
    MacaulayLayout L = macaulay_layout(degrees);
    ZMatrix a = macaulay_matrix(L, forms);
    mpz_class dp = det_auto(minor_of(a, L.minor_idx));
    if (dp != 0) {
      mpz_class delta = det_auto(a);
      if (delta == 0) return 0;
      if (!mpz_divisible_p(delta.get_mpz_t(), dp.get_mpz_t()))
        throw InternalError("minor does not divide elimination determinant");
      mpz_class res;
      mpz_divexact(res.get_mpz_t(), delta.get_mpz_t(), dp.get_mpz_t());
      return res;
    }
  }
  static const int kShearScalars[] = {1, -1, 2, -2, 3};
  for (int c : kShearScalars)
    for (int i = 0; i < nvars; i++)
      for (int j = 0; j < nvars; j++) {
        if (i == j) continue;
        PolyMap A = shear_map(nvars, i, j, c);
        std::vector<HomogeneousForm> sheared;
        sheared.reserve(forms.size());
        for (const auto& g : forms) sheared.push_back(pull_back(A, g));
        MacaulayLayout L = macaulay_layout(degrees);
        ZMatrix a = macaulay_matrix(L, sheared);
        mpz_class dp = det_auto(minor_of(a, L.minor_idx));
        if (dp == 0) continue;
        mpz_class delta = det_auto(a);
        if (delta == 0) return 0;
        if (!mpz_divisible_p(delta.get_mpz_t(), dp.get_mpz_t()))
          throw InternalError("minor does not divide elimination determinant");
        mpz_class res;
        mpz_divexact(res.get_mpz_t(), delta.get_mpz_t(), dp.get_mpz_t());
        return res;
      }
  // last resort: the resultant is the gcd of the elimination determinants
  // over all form orderings (sign left unnormalized)
  std::vector<int> perm(nvars);
  for (int i = 0; i < nvars; i++) perm[i] = i;
  mpz_class g = 0;
  do {
    std::vector<HomogeneousForm> pf;
    std::vector<int> pd;
    for (int i : perm) {
      pf.push_back(forms[i]);
      pd.push_back(degrees[i]);
    }
    MacaulayLayout L = macaulay_layout(pd);
    mpz_class delta = det_auto(macaulay_matrix(L, pf));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), delta.get_mpz_t());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return g;
}

}  // namespace

mpq_class resultant(const std::vector<HomogeneousForm>& forms,
                    const std::vector<int>& degrees) {
  if (forms.size() != degrees.size())
    throw MathRefusal("resultant needs one degree per form");
  int nvars = static_cast<int>(forms.size());
  if (nvars < 2) throw MathRefusal("resultant needs at least two forms");
  for (const auto& f : forms) {
    if (f.num_vars() != nvars)
      throw MathRefusal("resultant needs nvars forms in nvars variables");
    if (f.is_zero()) return 0;
  }
  for (int i = 0; i < nvars; i++)
    if (forms[i].degree() != degrees[i])
      throw MathRefusal("form degree does not match declared degree");
  std::vector<HomogeneousForm> prim;
  prim.reserve(forms.size());
  mpq_class multiplier = 1;
  for (int i = 0; i < nvars; i++) {
    PrimitiveForm pf = primitive_part(forms[i]);
    long di = 1;
    for (int j = 0; j < nvars; j++)
      if (j != i) di *= degrees[j];
    multiplier *= pow_q(pf.scalar, di);
    prim.push_back(std::move(pf.form));
  }
  return multiplier * mpq_class(resultant_core(prim, degrees));
}

mpq_class resultant(const PolyMap& f) {
  return resultant(f.comps, std::vector<int>(f.N + 1, f.d));
}

mpq_class sylvester_resultant(const HomogeneousForm& a,
                              const HomogeneousForm& b) {
  if (a.num_vars() != 2 || b.num_vars() != 2)
    throw MathRefusal("sylvester resultant needs binary forms");
  if (a.is_zero() || b.is_zero()) return 0;
  PrimitiveForm pa = primitive_part(a);
  PrimitiveForm pb = primitive_part(b);
  int da = a.degree(), db = b.degree();
  std::vector<mpz_class> ac(da + 1, 0), bc(db + 1, 0);
  for (const auto& [m, c] : pa.form.terms()) ac[m[1]] = c.get_num();
  for (const auto& [m, c] : pb.form.terms()) bc[m[1]] = c.get_num();
  std::size_t n = da + db;
  ZMatrix s(n, std::vector<mpz_class>(n, 0));
  for (int r = 0; r < db; r++)
    for (int i = 0; i <= da; i++) s[r][r + i] = ac[i];
  for (int r = 0; r < da; r++)
    for (int i = 0; i <= db; i++) s[db + r][r + i] = bc[i];
  return pow_q(pa.scalar, db) * pow_q(pb.scalar, da) *
         mpq_class(det_auto(s));
}

// ---------------------------------------------------------------------------
// graph elimination: R(Y) = Res_X(G_0 - X_aux^d Y_0, ..., G_N - X_aux^d Y_N, W)

namespace {

struct AuxSystem {
  MacaulayLayout layout;
  ZMatrix a0;  // Y-independent entries
  struct Mark {
    int row;
    int col;
    int yindex;
  };
  std::vector<Mark> marks;  // entry -= Y_{yindex} at (row, col)
  unsigned long bound_bits = 0;
};

Monomial pad(const Monomial& m, int nvars) {
  Monomial r = m;
  r.resize(nvars, 0);
  return r;
}

AuxSystem build_aux(const PolyMap& g, const HomogeneousForm& w) {
  int nv = g.N + 2;  // X_0..X_N plus the auxiliary variable
  int aux = nv - 1;
  std::vector<int> degrees(nv, g.d);
  degrees[nv - 1] = w.degree();
  AuxSystem sys;
  sys.layout = macaulay_layout(degrees);
  const MacaulayLayout& L = sys.layout;
  std::size_t n = L.cols.size();
  sys.a0.assign(n, std::vector<mpz_class>(n, 0));
  Monomial prod(nv);
  for (std::size_t r = 0; r < n; r++) {
    int cls = L.col_class[r];
    const Monomial& u = L.multiplier[r];
    const HomogeneousForm& src = cls <= g.N ? g.comps[cls] : w;
    for (const auto& [m, c] : src.terms()) {
      Monomial mm = pad(m, nv);
      for (int i = 0; i < nv; i++) prod[i] = u[i] + mm[i];
      int j = L.col_index(prod);
      if (j < 0) throw InternalError("aux system column lookup failed");
      sys.a0[r][j] += c.get_num();
    }
    if (cls <= g.N) {
      Monomial mk = u;
      mk[aux] += g.d;
      int j = L.col_index(mk);
      if (j < 0) throw InternalError("aux system mark lookup failed");
      sys.marks.push_back({static_cast<int>(r), j, cls});
    }
  }
  // |det| as a Y-polynomial is L1-bounded by the product of row L1 norms,
  // counting each Y slot with weight 1; a factor of an integer polynomial
  // gains at most 2^{sum of per-variable degrees} over its L2 norm
  unsigned long bits = 2;
  std::vector<std::size_t> marks_in_row(n, 0);
  for (const auto& mk : sys.marks) marks_in_row[mk.row]++;
  for (std::size_t r = 0; r < n; r++) {
    mpz_class l1 = 0;
    for (const auto& e : sys.a0[r]) l1 += abs(e);
    l1 += marks_in_row[r];
    if (l1 == 0) throw InternalError("aux system has an empty row");
    bits += mpz_sizeinbase(l1.get_mpz_t(), 2) + 1;
  }
  long D = 1;
  for (int i = 0; i < g.N; i++) D *= g.d;
  D *= w.degree();
  bits += static_cast<unsigned long>((g.N + 1) * D);
  sys.bound_bits = bits;
  return sys;
}

// ascending (total, reverse-lex) enumeration of exponent tuples
std::vector<Monomial> weight_ordered_tuples(int nvars, std::size_t count) {
  std::vector<Monomial> out;
  for (int s = 0; out.size() < count; s++) {
    std::vector<Monomial> layer = monomials_of_degree(nvars, s);
    for (auto it = layer.rbegin(); it != layer.rend() && out.size() < count;
         ++it)
      out.push_back(*it);
  }
  return out;
}

struct NodeEval {
  bool ok = false;
  uint64_t value = 0;  // delta / delta' mod p
};

// evaluate the specialized elimination quotient at Y_i = yvals[i] mod p
NodeEval eval_node_mod(const AuxSystem& sys,
                       const std::vector<std::vector<uint64_t>>& a0p,
                       const std::vector<uint64_t>& yvals, uint64_t p,
                       std::vector<std::vector<uint64_t>>& work,
                       std::vector<std::vector<uint64_t>>& mwork) {
  std::size_t n = sys.a0.size();
  for (std::size_t i = 0; i < n; i++)
    std::copy(a0p[i].begin(), a0p[i].end(), work[i].begin());
  for (const auto& mk : sys.marks)
    work[mk.row][mk.col] =
        modp::sub(work[mk.row][mk.col], yvals[mk.yindex], p);
  const auto& idx = sys.layout.minor_idx;
  for (std::size_t i = 0; i < idx.size(); i++)
    for (std::size_t j = 0; j < idx.size(); j++)
      mwork[i][j] = work[idx[i]][idx[j]];
  uint64_t dp = modp::det_mod(mwork, p);
  if (dp == 0) return {};
  uint64_t delta = modp::det_mod(work, p);
  return {true, modp::mul(delta, modp::inv(dp, p), p)};
}

// exact value of the same quotient over the integers (for the holdout node)
mpz_class eval_node_exact(const AuxSystem& sys,
                          const std::vector<mpz_class>& yvals, bool& usable) {
  ZMatrix work = sys.a0;
  for (const auto& mk : sys.marks)
    work[mk.row][mk.col] -= yvals[mk.yindex];
  mpz_class dp = det_auto(minor_of(work, sys.layout.minor_idx));
  if (dp == 0) {
    usable = false;
    return 0;
  }
  usable = true;
  mpz_class delta = det_auto(work);
  if (delta == 0) return 0;
  if (!mpz_divisible_p(delta.get_mpz_t(), dp.get_mpz_t()))
    throw InternalError("holdout minor does not divide determinant");
  mpz_class r;
  mpz_divexact(r.get_mpz_t(), delta.get_mpz_t(), dp.get_mpz_t());
  return r;
}

struct EliminationResult {
  std::vector<Monomial> basis;     // affine monomials in Y_0..Y_{N-1}
  std::vector<mpz_class> coeffs;   // same order
};

// interpolate R over the simplex lattice, one prime at a time, then CRT
EliminationResult interpolate_elimination(const PolyMap& g,
                                          const HomogeneousForm& w) {
  AuxSystem sys = build_aux(g, w);
  int naff = g.N;  // affine Y variables after setting Y_N = 1
  long D = w.degree();
  for (int i = 0; i < g.N; i++) D *= g.d;
  // all affine monomials of total degree <= D
  std::size_t count = 1;
  for (int i = 1; i <= naff; i++) count = count * (D + i) / i;
  std::vector<Monomial> basis = weight_ordered_tuples(naff, count);
  std::size_t M = basis.size();
  std::vector<Monomial> pool = weight_ordered_tuples(naff, M + 16);
  std::size_t n = sys.a0.size();

  std::vector<CrtAccumulator> acc(M);
  std::vector<std::vector<uint64_t>> work(n, std::vector<uint64_t>(n));
  std::vector<std::vector<uint64_t>> mwork(
      sys.layout.minor_idx.size(),
      std::vector<uint64_t>(sys.layout.minor_idx.size()));
  mpz_class modulus = 1;
  int failed_primes = 0;
  for (std::size_t pidx = 0;; pidx++) {
    if (pidx > 64) throw InternalError("interpolation used too many primes");
    uint64_t p = modp::prime(pidx);
    std::vector<std::vector<uint64_t>> a0p(n, std::vector<uint64_t>(n));
    for (std::size_t i = 0; i < n; i++)
      for (std::size_t j = 0; j < n; j++)
        a0p[i][j] = modp::reduce(sys.a0[i][j], p);
    // incremental echelon over the value rows
    std::vector<std::vector<uint64_t>> rows;  // reduced, augmented by value
    std::vector<std::size_t> pivot_col;
    std::vector<uint64_t> yvals(naff + 1);
    yvals[naff] = 1 % p;
    std::vector<uint64_t> row(M + 1);
    for (const auto& node : pool) {
      if (rows.size() == M) break;
      for (int i = 0; i < naff; i++) yvals[i] = node[i] % p;
      NodeEval ev = eval_node_mod(sys, a0p, yvals, p, work, mwork);
      if (!ev.ok) continue;
      for (std::size_t j = 0; j < M; j++) {
        uint64_t v = 1;
        for (int i = 0; i < naff; i++)
          v = modp::mul(v, modp::pow(yvals[i], basis[j][i], p), p);
        row[j] = v;
      }
      row[M] = ev.value;
      for (std::size_t r = 0; r < rows.size(); r++) {
        uint64_t f = row[pivot_col[r]];
        if (f == 0) continue;
        modp::FixedMul fm(f, p);
        for (std::size_t j = 0; j <= M; j++)
          row[j] = modp::sub(row[j], fm.apply(rows[r][j], p), p);
      }
      std::size_t pc = M + 1;
      for (std::size_t j = 0; j < M; j++)
        if (row[j] != 0) {
          pc = j;
          break;
        }
      if (pc == M + 1) continue;  // dependent node
      modp::FixedMul norm(modp::inv(row[pc], p), p);
      for (std::size_t j = 0; j <= M; j++) row[j] = norm.apply(row[j], p);
      rows.push_back(row);
      pivot_col.push_back(pc);
    }
    if (rows.size() < M) {
      if (++failed_primes >= 5)
        throw InternalError("interpolation nodes degenerate mod many primes");
      continue;
    }
    // back substitution: solution x with x[pivot] determined in reverse
    std::vector<uint64_t> x(M, 0);
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); i++) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pivot_col[a] > pivot_col[b];
    });
    for (std::size_t oi : order) {
      const auto& r = rows[oi];
      std::size_t pc = pivot_col[oi];
      uint64_t v = r[M];
      for (std::size_t j = pc + 1; j < M; j++)
        if (r[j] != 0 && x[j] != 0)
          v = modp::sub(v, modp::mul(r[j], x[j], p), p);
      x[pc] = v;
    }
    for (std::size_t j = 0; j < M; j++) acc[j].absorb(x[j], p);
    modulus = acc[0].modulus;
    if (mpz_sizeinbase(modulus.get_mpz_t(), 2) > sys.bound_bits + 1) break;
  }

  EliminationResult out;
  out.basis = basis;
  out.coeffs.resize(M);
  for (std::size_t j = 0; j < M; j++) out.coeffs[j] = acc[j].symmetric();

  // holdout validation at a node no prime used
  std::vector<Monomial> beyond = weight_ordered_tuples(naff, pool.size() + 50);
  bool checked = false;
  for (std::size_t c = pool.size(); c < beyond.size() && !checked; c++) {
    std::vector<mpz_class> yv(naff + 1);
    for (int i = 0; i < naff; i++) yv[i] = beyond[c][i];
    yv[naff] = 1;
    bool usable = false;
    mpz_class exact = eval_node_exact(sys, yv, usable);
    if (!usable) continue;
    mpz_class assembled = 0;
    for (std::size_t j = 0; j < M; j++) {
      if (out.coeffs[j] == 0) continue;
      mpz_class t = out.coeffs[j];
      for (int i = 0; i < naff; i++)
        t *= pow_z(yv[i], basis[j][i]);
      assembled += t;
    }
    if (assembled != exact)
      throw InternalError("interpolated elimination form fails holdout check");
    checked = true;
  }
  if (!checked)
    throw InternalError("no usable holdout node for elimination form");
  return out;
}

}  // namespace

PushforwardResult push_forward(const PolyMap& f, const HomogeneousForm& phi) {
  if (phi.num_vars() != f.N + 1)
    throw MathRefusal("form/map variable count mismatch");
  if (phi.is_zero()) throw MathRefusal("pushforward of the zero form");
  long dn = 1;
  for (int i = 0; i < f.N; i++) dn *= f.d;
  long dn1 = dn * f.d;  // d^{N+1}
  mpq_class res = resultant(f);
  if (res == 0) throw MathRefusal("not a morphism: resultant vanishes");
  if (phi.degree() == 0) {
    HomogeneousForm out(f.N + 1, 0);
    out.add_term(Monomial(f.N + 1, 0), pow_q(phi.leading().second, dn1));
    return {out, 1};
  }
  PrimitiveMap pm = primitive_map(f);
  PrimitiveForm pw = primitive_part(phi);
  long e = phi.degree();
  mpq_class res_g = resultant(pm.map);

  EliminationResult r = interpolate_elimination(pm.map, pw.form);
  long D = dn * e;
  // scale: rational phi and map contents, then the resultant power
  mpq_class scale = pow_q(pw.scalar, dn1) / pow_q(pm.scalar, dn * e);
  scale /= pow_q(res_g, e);
  HomogeneousForm out(f.N + 1, static_cast<int>(D));
  bool nonzero = false;
  for (std::size_t j = 0; j < r.basis.size(); j++) {
    if (r.coeffs[j] == 0) continue;
    nonzero = true;
    Monomial m(f.N + 1, 0);
    long s = 0;
    for (int i = 0; i < f.N; i++) {
      m[i] = r.basis[j][i];
      s += m[i];
    }
    if (s > D) throw InternalError("elimination form degree overflow");
    m[f.N] = static_cast<int>(D - s);
    out.add_term(m, mpq_class(r.coeffs[j]) * scale);
  }
  if (!nonzero) throw InternalError("elimination form vanished");
  return {out, pow_q(res, e)};
}

HomogeneousForm push_forward_point_p1(const PolyMap& f,
                                      const std::vector<mpq_class>& q) {
  if (f.N != 1) throw MathRefusal("point pushforward shortcut needs N=1");
  if (q.size() != 2 || (q[0] == 0 && q[1] == 0))
    throw MathRefusal("bad projective point");
  mpq_class res = resultant(f);
  if (res == 0) throw MathRefusal("not a morphism: resultant vanishes");
  std::vector<mpq_class> fq = evaluate(f, q);
  HomogeneousForm line(2, 1);
  line.add_term(Monomial{0, 1}, fq[0]);
  line.add_term(Monomial{1, 0}, -fq[1]);
  HomogeneousForm closed =
      pow(line, static_cast<unsigned long>(f.d)).scaled(1 / res);
  HomogeneousForm start(2, 1);
  start.add_term(Monomial{0, 1}, q[0]);
  start.add_term(Monomial{1, 0}, -q[1]);
  if (push_forward(f, start).form != closed)
    throw InternalError("point pushforward disagrees with elimination form");
  return closed;
}

HomogeneousForm form_dth_root(const HomogeneousForm& u, int d) {
  if (d < 1) throw InternalError("root exponent must be positive");
  if (d == 1) return u;
  if (u.is_zero() || u.degree() % d != 0)
    throw InternalError("form is not a d-th power: bad shape");
  if (!u.is_integral() || sgn(u.leading().second) < 0)
    throw InternalError("root extraction expects positive integral form");
  int nv = u.num_vars();
  const auto& [lm, lc] = u.leading();
  Monomial vm(nv);
  for (int i = 0; i < nv; i++) {
    if (lm[i] % d != 0)
      throw InternalError("form is not a d-th power: leading monomial");
    vm[i] = lm[i] / d;
  }
  mpz_class lroot;
  if (!mpz_root(lroot.get_mpz_t(), lc.get_num().get_mpz_t(), d))
    throw InternalError("form is not a d-th power: leading coefficient");
  HomogeneousForm v =
      HomogeneousForm::monomial(nv, vm, mpq_class(lroot));
  mpq_class dlead = d * pow_q(mpq_class(lroot), d - 1);
  long guard = 4;
  for (int i = 0; i < nv; i++) guard *= u.degree() / d + 1;
  for (long it = 0; it < guard; it++) {
    HomogeneousForm rem = u - pow(v, static_cast<unsigned long>(d));
    if (rem.is_zero()) return v;
    const auto& [rm, rc] = rem.leading();
    Monomial tm(nv);
    for (int i = 0; i < nv; i++) {
      int e = rm[i] - (d - 1) * vm[i];
      if (e < 0) throw InternalError("form is not a d-th power: term shape");
      tm[i] = e;
    }
    mpq_class tc = rc / dlead;
    if (tc.get_den() != 1)
      throw InternalError("form is not a d-th power: term coefficient");
    v.add_term(tm, tc);
  }
  throw InternalError("root extraction did not terminate");
}

namespace {

// affine coefficient vector (by Y_0 exponent) of a binary form in Y
std::vector<mpz_class> affine_coeffs(const HomogeneousForm& v, int deg) {
  std::vector<mpz_class> c(deg + 1, 0);
  for (const auto& [m, q] : v.terms()) c[m[0]] = q.get_num();
  return c;
}

// coefficients in descending X0 order: c[i] multiplies X0^{deg-i} X1^i
std::vector<mpz_class> descending_coeffs(const HomogeneousForm& a) {
  std::vector<mpz_class> c(a.degree() + 1, 0);
  for (const auto& [m, q] : a.terms()) c[m[1]] = q.get_num();
  return c;
}

// determine sigma in F_* w = sigma * v^d / Res(g)^e by comparing, modulo a
// prime, the interpolated graph elimination form against +-v^d
int pushforward_sign_p1(const PolyMap& g, const HomogeneousForm& w,
                        const HomogeneousForm& vraw) {
  int e = w.degree();
  int de = g.d * e;
  AuxSystem sys = build_aux(g, w);
  std::size_t n = sys.a0.size();
  std::vector<std::vector<uint64_t>> work(n, std::vector<uint64_t>(n));
  std::vector<std::vector<uint64_t>> mwork(
      sys.layout.minor_idx.size(),
      std::vector<uint64_t>(sys.layout.minor_idx.size()));
  std::vector<mpz_class> vaff = affine_coeffs(vraw, e);
  for (int pidx = 0; pidx < 6; pidx++) {
    uint64_t p = modp::prime(pidx);
    std::vector<std::vector<uint64_t>> a0p(n, std::vector<uint64_t>(n));
    for (std::size_t i = 0; i < n; i++)
      for (std::size_t j = 0; j < n; j++)
        a0p[i][j] = modp::reduce(sys.a0[i][j], p);
    // v^d mod p as an affine polynomial
    std::vector<uint64_t> vd(1, 1);
    std::vector<uint64_t> vp(e + 1);
    bool vzero = true;
    for (int i = 0; i <= e; i++) {
      vp[i] = modp::reduce(vaff[i], p);
      vzero = vzero && vp[i] == 0;
    }
    if (vzero) continue;  // content divisible by p
    for (int rep = 0; rep < g.d; rep++) {
      std::vector<uint64_t> nx(vd.size() + e, 0);
      for (std::size_t i = 0; i < vd.size(); i++)
        for (int j = 0; j <= e; j++)
          nx[i + j] = modp::add(nx[i + j], modp::mul(vd[i], vp[j], p), p);
      vd = std::move(nx);
    }
    // interpolate the elimination form mod p on de+1 usable nodes
    std::vector<uint64_t> yvals(2);
    yvals[1] = 1 % p;
    std::vector<long> xs;
    std::vector<uint64_t> vals;
    for (long y = 0; static_cast<int>(xs.size()) < de + 1 && y < de + 40;
         y++) {
      yvals[0] = y % p;
      NodeEval ev = eval_node_mod(sys, a0p, yvals, p, work, mwork);
      if (!ev.ok) continue;
      xs.push_back(y);
      vals.push_back(ev.value);
    }
    if (static_cast<int>(xs.size()) < de + 1) continue;
    // Newton interpolation mod p
    std::vector<uint64_t> divided = vals;
    for (int lvl = 1; lvl <= de; lvl++)
      for (int i = de; i >= lvl; i--) {
        uint64_t num = modp::sub(divided[i], divided[i - 1], p);
        uint64_t den =
            modp::reduce(mpz_class(xs[i] - xs[i - lvl]), p);
        divided[i] = modp::mul(num, modp::inv(den, p), p);
      }
    std::vector<uint64_t> rpoly(1, divided[de]);
    for (int i = de - 1; i >= 0; i--) {
      std::vector<uint64_t> nx(rpoly.size() + 1, 0);
      uint64_t root = modp::reduce(mpz_class(xs[i]), p);
      for (std::size_t j = 0; j < rpoly.size(); j++) {
        nx[j + 1] = modp::add(nx[j + 1], rpoly[j], p);
        nx[j] = modp::sub(nx[j], modp::mul(rpoly[j], root, p), p);
      }
      nx[0] = modp::add(nx[0], divided[i], p);
      rpoly = std::move(nx);
    }
    rpoly.resize(de + 1, 0);
    bool plus = true, minus = true;
    for (int i = 0; i <= de; i++) {
      uint64_t lhs = rpoly[i];
      plus = plus && lhs == vd[i];
      minus = minus && lhs == (vd[i] == 0 ? 0 : p - vd[i]);
    }
    if (plus && !minus) return 1;
    if (minus && !plus) return -1;
    // both match only if v^d = 0 mod p, excluded above; retry otherwise
  }
  throw InternalError("pushforward sign determination failed");
}

}  // namespace

DivisorStep push_divisor(const PolyMap& f, const HomogeneousForm& phi) {
  if (phi.num_vars() != f.N + 1)
    throw MathRefusal("form/map variable count mismatch");
  if (phi.is_zero() || phi.degree() < 1)
    throw MathRefusal("divisor form must have positive degree");
  PrimitiveMap pm = primitive_map(f);
  PrimitiveForm pw = primitive_part(phi);
  const PolyMap& g = pm.map;
  const HomogeneousForm& w = pw.form;
  long e = phi.degree();
  long dn = 1;
  for (int i = 0; i < f.N; i++) dn *= f.d;
  // F_* phi = (phi scalar)^{d^{N+1}} (map scalar)^{-d^N e} G_* w
  mpq_class outer =
      pow_q(pw.scalar, dn * f.d) / pow_q(pm.scalar, dn * e);

  if (f.N == 1) {
    mpq_class res_q = resultant(g);
    if (res_q == 0) throw MathRefusal("not a morphism: resultant vanishes");
    mpz_class res = res_q.get_num();
    // V(Y) = Res_X(w, G0 Y1 - G1 Y0) cuts f_* div(w); interpolate it from
    // Sylvester determinants at Y = (y, 1)
    std::vector<mpz_class> g0 = descending_coeffs(g.comps[0]);
    std::vector<mpz_class> g1 = descending_coeffs(g.comps[1]);
    std::vector<mpz_class> wc = descending_coeffs(w);
    std::size_t n = e + g.d;
    std::vector<long> nodes;
    for (long y = 0; static_cast<long>(nodes.size()) <= e; y++)
      nodes.push_back(y % 2 ? -(y + 1) / 2 : y / 2);  // 0, -1, 1, -2, 2, ...
    std::vector<mpz_class> vals;
    for (long y : nodes) {
      ZMatrix s(n, std::vector<mpz_class>(n, 0));
      for (long r = 0; r < g.d; r++)
        for (long i = 0; i <= e; i++) s[r][r + i] = wc[i];
      for (long r = 0; r < e; r++)
        for (long i = 0; i <= g.d; i++)
          s[g.d + r][r + i] = g0[i] - y * g1[i];
      vals.push_back(det_bareiss(std::move(s)));
    }
    // exact Newton interpolation; divided differences must stay integral
    std::vector<mpq_class> dd(vals.begin(), vals.end());
    for (long lvl = 1; lvl <= e; lvl++)
      for (long i = e; i >= lvl; i--)
        dd[i] = (dd[i] - dd[i - 1]) / mpq_class(nodes[i] - nodes[i - lvl]);
    std::vector<mpq_class> poly(1, dd[e]);
    for (long i = e - 1; i >= 0; i--) {
      std::vector<mpq_class> nx(poly.size() + 1, 0);
      for (std::size_t j = 0; j < poly.size(); j++) {
        nx[j + 1] += poly[j];
        nx[j] -= poly[j] * nodes[i];
      }
      nx[0] += dd[i];
      poly = std::move(nx);
    }
    poly.resize(e + 1, 0);
    HomogeneousForm vraw(2, static_cast<int>(e));
    for (long i = 0; i <= e; i++) {
      if (poly[i] == 0) continue;
      if (poly[i].get_den() != 1)
        throw InternalError("divisor step interpolation left a denominator");
      vraw.add_term(Monomial{static_cast<int>(i), static_cast<int>(e - i)},
                    poly[i]);
    }
    if (vraw.is_zero()) throw InternalError("divisor step vanished");
    PrimitiveForm pv = primitive_part(vraw);
    int sigma = pushforward_sign_p1(g, w, vraw);
    // G_* w = sigma * vraw^d / Res^e
    mpq_class scalar =
        outer * sigma * pow_q(pv.scalar, g.d) / pow_q(mpq_class(res), e);
    return {pv.form, scalar};
  }

  PushforwardResult pf = push_forward(g, w);
  PrimitiveForm pu = primitive_part(pf.form);
  HomogeneousForm v = form_dth_root(pu.form, f.d);
  return {v, outer * pu.scalar};
}

}  // namespace divht
