#include "divht/form.hpp"

#include <algorithm>

#include "divht/errors.hpp"

namespace divht {

int total_degree(const Monomial& m) {
  int t = 0;
  for (int e : m) t += e;
  return t;
}

bool LexGreater::operator()(const Monomial& a, const Monomial& b) const {
  std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; i++) {
    int ea = i < a.size() ? a[i] : 0;
    int eb = i < b.size() ? b[i] : 0;
    if (ea != eb) return ea > eb;
  }
  return false;
}

HomogeneousForm::HomogeneousForm(int num_vars, int degree)
    : nvars_(num_vars), degree_(degree) {
  if (num_vars < 1 || degree < 0) throw MathRefusal("bad form shape");
}

HomogeneousForm HomogeneousForm::monomial(int num_vars, const Monomial& exps,
                                          const mpq_class& coeff) {
  HomogeneousForm f(num_vars, total_degree(exps));
  f.add_term(exps, coeff);
  return f;
}

HomogeneousForm HomogeneousForm::variable(int num_vars, int index) {
  Monomial m(num_vars, 0);
  m.at(index) = 1;
  return monomial(num_vars, m, 1);
}

void HomogeneousForm::add_term(const Monomial& m, const mpq_class& c) {
  if (c == 0) return;
  if (static_cast<int>(m.size()) != nvars_) throw MathRefusal("bad monomial");
  for (int e : m)
    if (e < 0) throw MathRefusal("negative exponent");
  if (total_degree(m) != degree_) throw MathRefusal("inhomogeneous term");
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

mpq_class HomogeneousForm::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

const std::pair<const Monomial, mpq_class>& HomogeneousForm::leading() const {
  if (terms_.empty()) throw MathRefusal("leading term of zero form");
  return *terms_.begin();
}

HomogeneousForm HomogeneousForm::operator-() const { return scaled(-1); }

HomogeneousForm HomogeneousForm::operator+(const HomogeneousForm& o) const {
  if (nvars_ != o.nvars_ || degree_ != o.degree_)
    throw MathRefusal("form shape mismatch in sum");
  HomogeneousForm r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

HomogeneousForm HomogeneousForm::operator-(const HomogeneousForm& o) const {
  return *this + (-o);
}

HomogeneousForm HomogeneousForm::operator*(const HomogeneousForm& o) const {
  if (nvars_ != o.nvars_) throw MathRefusal("form shape mismatch in product");
  HomogeneousForm r(nvars_, degree_ + o.degree_);
  if (is_zero() || o.is_zero()) return r;
  Monomial m(nvars_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      for (int i = 0; i < nvars_; i++) m[i] = ma[i] + mb[i];
      r.add_term(m, ca * cb);
    }
  return r;
}

bool HomogeneousForm::operator==(const HomogeneousForm& o) const {
  return nvars_ == o.nvars_ && degree_ == o.degree_ && terms_ == o.terms_;
}

HomogeneousForm HomogeneousForm::scaled(const mpq_class& c) const {
  HomogeneousForm r(nvars_, degree_);
  if (c == 0) return r;
  for (const auto& [m, a] : terms_) r.terms_.emplace(m, a * c);
  return r;
}

HomogeneousForm HomogeneousForm::derivative(int var) const {
  if (degree_ == 0) return HomogeneousForm(nvars_, 0);
  HomogeneousForm r(nvars_, degree_ - 1);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial dm = m;
    dm[var]--;
    r.add_term(dm, c * m[var]);
  }
  return r;
}

mpq_class HomogeneousForm::evaluate(const std::vector<mpq_class>& x) const {
  if (static_cast<int>(x.size()) != nvars_)
    throw MathRefusal("point dimension mismatch");
  mpq_class acc = 0;
  for (const auto& [m, c] : terms_) {
    mpq_class t = c;
    for (int i = 0; i < nvars_; i++)
      for (int e = 0; e < m[i]; e++) t *= x[i];
    acc += t;
  }
  return acc;
}

bool HomogeneousForm::is_integral() const {
  for (const auto& [m, c] : terms_)
    if (c.get_den() != 1) return false;
  return true;
}

mpq_class HomogeneousForm::max_abs_coeff() const {
  mpq_class best = 0;
  for (const auto& [m, c] : terms_) {
    mpq_class a = abs(c);
    if (a > best) best = a;
  }
  return best;
}

mpq_class HomogeneousForm::l1_norm() const {
  mpq_class s = 0;
  for (const auto& [m, c] : terms_) s += abs(c);
  return s;
}

HomogeneousForm pow(const HomogeneousForm& a, unsigned long e) {
  HomogeneousForm r = HomogeneousForm::monomial(
      a.num_vars(), Monomial(a.num_vars(), 0), 1);
  HomogeneousForm base = a;
  while (e > 0) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

PrimitiveForm primitive_part(const HomogeneousForm& a) {
  if (a.is_zero()) return {a, 0};
  // content = gcd of numerators / lcm of denominators
  mpz_class g = 0, l = 1;
  for (const auto& [m, c] : a.terms()) {
    mpz_class num = c.get_num(), den = c.get_den();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
  }
  mpq_class content = make_q(g, l);
  if (sgn(a.leading().second) < 0) content = -content;
  return {a.scaled(make_q(content.get_den(), content.get_num())), content};
}

PolyMap make_map(std::vector<HomogeneousForm> comps) {
  if (comps.size() < 2) throw MathRefusal("map needs at least two components");
  int nv = comps[0].num_vars();
  int d = comps[0].degree();
  if (nv != static_cast<int>(comps.size()))
    throw MathRefusal("component count must match variable count");
  bool any = false;
  for (const auto& f : comps) {
    if (f.num_vars() != nv || f.degree() != d)
      throw MathRefusal("map components must share shape");
    any = any || !f.is_zero();
  }
  if (!any) throw MathRefusal("zero map");
  if (d < 1) throw MathRefusal("map degree must be at least 1");
  PolyMap f;
  f.N = nv - 1;
  f.d = d;
  f.comps = std::move(comps);
  return f;
}

PrimitiveMap primitive_map(const PolyMap& f) {
  mpz_class g = 0, l = 1;
  for (const auto& comp : f.comps)
    for (const auto& [m, c] : comp.terms()) {
      mpz_class num = c.get_num(), den = c.get_den();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
    }
  mpq_class content = make_q(g, l);  // > 0: joint content, sign kept on comps
  PolyMap out = f;
  mpq_class inv = make_q(content.get_den(), content.get_num());
  for (auto& comp : out.comps) comp = comp.scaled(inv);
  return {std::move(out), content};
}

std::vector<mpq_class> evaluate(const PolyMap& f,
                                const std::vector<mpq_class>& x) {
  std::vector<mpq_class> y;
  y.reserve(f.comps.size());
  for (const auto& comp : f.comps) y.push_back(comp.evaluate(x));
  return y;
}

HomogeneousForm pull_back(const PolyMap& f, const HomogeneousForm& phi) {
  if (phi.num_vars() != f.N + 1)
    throw MathRefusal("form/map variable count mismatch");
  int nv = f.N + 1;
  // cache powers of each component up to the largest exponent used
  std::vector<std::vector<HomogeneousForm>> powers(nv);
  for (int i = 0; i < nv; i++)
    powers[i].push_back(HomogeneousForm::monomial(nv, Monomial(nv, 0), 1));
  HomogeneousForm r(nv, f.d * phi.degree());
  for (const auto& [m, c] : phi.terms()) {
    HomogeneousForm t = HomogeneousForm::monomial(nv, Monomial(nv, 0), c);
    for (int i = 0; i < nv; i++) {
      while (static_cast<int>(powers[i].size()) <= m[i])
        powers[i].push_back(powers[i].back() * f.comps[i]);
      if (m[i] > 0) t = t * powers[i][m[i]];
    }
    r = r + t;
  }
  return r;
}

namespace {

HomogeneousForm form_det(const std::vector<std::vector<HomogeneousForm>>& a,
                         std::vector<int> rows, std::vector<int> cols) {
  int nv = a[0][0].num_vars();
  if (rows.size() == 1) return a[rows[0]][cols[0]];
  int dsum = 0;
  for (std::size_t i = 0; i < rows.size(); i++)
    dsum += a[rows[i]][cols[i]].degree();
  HomogeneousForm acc(nv, dsum);
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); j++) {
    if (a[rows[0]][cols[j]].is_zero()) continue;
    std::vector<int> sub_cols;
    for (std::size_t k = 0; k < cols.size(); k++)
      if (k != j) sub_cols.push_back(cols[k]);
    HomogeneousForm minor = form_det(a, sub_rows, sub_cols);
    HomogeneousForm term = a[rows[0]][cols[j]] * minor;
    acc = acc + (j % 2 ? -term : term);
  }
  return acc;
}

}  // namespace

HomogeneousForm jacobian_form(const PolyMap& f) {
  int nv = f.N + 1;
  std::vector<std::vector<HomogeneousForm>> a(
      nv, std::vector<HomogeneousForm>(nv));
  for (int i = 0; i < nv; i++)
    for (int j = 0; j < nv; j++) a[i][j] = f.comps[i].derivative(j);
  std::vector<int> idx(nv);
  for (int i = 0; i < nv; i++) idx[i] = i;
  return form_det(a, idx, idx);
}

PolyMap compose(const PolyMap& f, const PolyMap& g) {
  if (f.N != g.N) throw MathRefusal("composition dimension mismatch");
  std::vector<HomogeneousForm> comps;
  comps.reserve(f.comps.size());
  for (const auto& comp : f.comps) comps.push_back(pull_back(g, comp));
  return make_map(std::move(comps));
}

mpq_class map_max_abs_coeff(const PolyMap& f) {
  mpq_class best = 0;
  for (const auto& comp : f.comps) {
    mpq_class a = comp.max_abs_coeff();
    if (a > best) best = a;
  }
  return best;
}

}  // namespace divht
