#include "divht/parse.hpp"

#include <cctype>
#include <sstream>

#include "divht/errors.hpp"

namespace divht {

namespace {

// general sparse polynomial while parsing; homogeneity is checked at the end
using Poly = std::map<Monomial, mpq_class, LexGreater>;

void poly_add(Poly& a, const Monomial& m, const mpq_class& c) {
  auto it = a.find(m);
  if (it == a.end()) {
    if (c != 0) a.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) a.erase(it);
  }
}

Poly poly_mul(const Poly& a, const Poly& b, int nv) {
  Poly r;
  Monomial m(nv);
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      for (int i = 0; i < nv; i++) m[i] = ma[i] + mb[i];
      poly_add(r, m, ca * cb);
    }
  return r;
}

struct Parser {
  const std::string& s;
  int nv;
  std::size_t pos = 0;

  Parser(const std::string& text, int num_vars) : s(text), nv(num_vars) {}

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    std::ostringstream os;
    os << "col " << at + 1 << ": " << msg;
    throw ParseError(os.str());
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      pos++;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool eat(char c) {
    if (!peek_is(c)) return false;
    pos++;
    return true;
  }

  mpz_class read_digits() {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      pos++;
    if (pos == start) fail("expected digits", start);
    return mpz_class(s.substr(start, pos - start), 10);
  }

  mpq_class read_rational() {
    skip_ws();
    std::size_t start = pos;
    mpz_class ip = read_digits();
    mpq_class val(ip);
    if (pos < s.size() && s[pos] == '.') {
      pos++;
      std::size_t fs = pos;
      mpz_class frac = read_digits();
      mpz_class den = 1;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, pos - fs);
      val += make_q(frac, den);
    } else if (pos < s.size() && s[pos] == '/') {
      pos++;
      skip_ws();
      mpz_class den = read_digits();
      if (den == 0) fail("zero denominator", start);
      val = make_q(ip, den);
    }
    return val;
  }

  // X3, x3, Y3, y3
  int read_var_index() {
    std::size_t start = pos;
    pos++;  // prefix letter already checked
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      fail("variable needs an index", start);
    mpz_class idx = read_digits();
    if (idx >= nv) {
      std::ostringstream os;
      os << "variable index " << idx << " out of range (have " << nv
         << " variables)";
      fail(os.str(), start);
    }
    return static_cast<int>(idx.get_si());
  }

  unsigned long read_exponent() {
    skip_ws();
    std::size_t start = pos;
    mpz_class e = read_digits();
    if (e > 64) fail("exponent too large", start);
    return e.get_ui();
  }

  Poly parse_primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input", pos);
    char c = s[pos];
    if (c == '(') {
      std::size_t open = pos;
      pos++;
      Poly inner = parse_expr();
      if (!eat(')')) fail("unmatched '('", open);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpq_class q = read_rational();
      Poly r;
      poly_add(r, Monomial(nv, 0), q);
      return r;
    }
    if (c == 'X' || c == 'x' || c == 'Y' || c == 'y') {
      int idx = read_var_index();
      Monomial m(nv, 0);
      m[idx] = 1;
      Poly r;
      r.emplace(m, 1);
      return r;
    }
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  Poly parse_factor() {
    Poly base = parse_primary();
    if (eat('^')) {
      unsigned long e = read_exponent();
      Poly r;
      poly_add(r, Monomial(nv, 0), 1);
      for (unsigned long i = 0; i < e; i++) r = poly_mul(r, base, nv);
      return r;
    }
    return base;
  }

  bool at_factor_start() {
    skip_ws();
    if (pos >= s.size()) return false;
    char c = s[pos];
    return c == '(' || c == 'X' || c == 'x' || c == 'Y' || c == 'y' ||
           std::isdigit(static_cast<unsigned char>(c));
  }

  Poly parse_term() {
    Poly acc = parse_factor();
    for (;;) {
      if (eat('*')) {
        acc = poly_mul(acc, parse_factor(), nv);
      } else if (at_factor_start()) {
        // juxtaposition: 2X0, X0X1, 3(X0+X1)
        acc = poly_mul(acc, parse_factor(), nv);
      } else {
        break;
      }
    }
    return acc;
  }

  Poly parse_expr() {
    Poly acc;
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    for (;;) {
      Poly t = parse_term();
      for (const auto& [m, c] : t) poly_add(acc, m, neg ? -c : c);
      if (eat('-'))
        neg = true;
      else if (eat('+'))
        neg = false;
      else
        break;
    }
    return acc;
  }

  Poly run() {
    Poly p = parse_expr();
    skip_ws();
    if (pos != s.size())
      fail(std::string("unexpected character '") + s[pos] + "'", pos);
    return p;
  }
};

}  // namespace

HomogeneousForm parse_form(const std::string& text, int num_vars) {
  if (num_vars < 1) throw ParseError("need at least one variable");
  Parser parser(text, num_vars);
  Poly p = parser.run();
  if (p.empty()) return HomogeneousForm(num_vars, 0);
  int deg = total_degree(p.begin()->first);
  for (const auto& [m, c] : p)
    if (total_degree(m) != deg)
      throw ParseError("polynomial is not homogeneous (degrees " +
                       std::to_string(deg) + " and " +
                       std::to_string(total_degree(m)) + " both present)");
  HomogeneousForm f(num_vars, deg);
  for (const auto& [m, c] : p) f.add_term(m, c);
  return f;
}

std::vector<mpq_class> parse_point(const std::string& text, int num_vars) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (static_cast<int>(parts.size()) != num_vars)
    throw ParseError("point needs " + std::to_string(num_vars) +
                     " coordinates, got " + std::to_string(parts.size()));
  std::vector<mpq_class> out;
  out.reserve(parts.size());
  for (const auto& part : parts) out.push_back(parse_rational(part));
  bool any = false;
  for (const auto& q : out) any = any || q != 0;
  if (!any) throw ParseError("projective point cannot be all zeros");
  return out;
}

PolyMap parse_map(const std::vector<std::string>& comps, int N, int d) {
  if (N < 1) throw ParseError("N must be at least 1");
  if (d < 1) throw ParseError("d must be at least 1");
  if (static_cast<int>(comps.size()) != N + 1)
    throw ParseError("map needs " + std::to_string(N + 1) +
                     " components, got " + std::to_string(comps.size()));
  std::vector<HomogeneousForm> forms;
  forms.reserve(comps.size());
  for (std::size_t i = 0; i < comps.size(); i++) {
    HomogeneousForm f;
    try {
      f = parse_form(comps[i], N + 1);
    } catch (const ParseError& e) {
      throw ParseError("component " + std::to_string(i) + ": " + e.what());
    }
    if (!f.is_zero() && f.degree() != d)
      throw ParseError("component " + std::to_string(i) + " has degree " +
                       std::to_string(f.degree()) + ", expected " +
                       std::to_string(d));
    if (f.is_zero()) f = HomogeneousForm(N + 1, d);
    forms.push_back(std::move(f));
  }
  return make_map(std::move(forms));
}

mpq_class parse_rational(const std::string& text) {
  Parser parser(text, 1);
  parser.skip_ws();
  bool neg = parser.eat('-');
  if (!neg) parser.eat('+');
  parser.skip_ws();
  if (parser.pos >= text.size() ||
      !std::isdigit(static_cast<unsigned char>(text[parser.pos])))
    parser.fail("expected a rational number", parser.pos);
  mpq_class q = parser.read_rational();
  parser.skip_ws();
  if (parser.pos != text.size())
    parser.fail(std::string("unexpected character '") + text[parser.pos] + "'",
                parser.pos);
  return neg ? mpq_class(-q) : q;
}

std::string rational_to_string(const mpq_class& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

std::string form_to_string(const HomogeneousForm& f,
                           const std::string& var_prefix) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    mpq_class a = abs(c);
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    bool printed_coeff = false;
    if (a != 1 || total_degree(m) == 0) {
      os << rational_to_string(a);
      printed_coeff = true;
    }
    for (std::size_t i = 0; i < m.size(); i++) {
      if (m[i] == 0) continue;
      if (printed_coeff) os << "*";
      os << var_prefix << i;
      if (m[i] > 1) os << "^" << m[i];
      printed_coeff = true;
    }
  }
  return os.str();
}

}  // namespace divht
