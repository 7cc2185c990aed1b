#pragma once
#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "divht/interval.hpp"

namespace divht {

// exponent vector, one entry per variable
using Monomial = std::vector<int>;

int total_degree(const Monomial& m);

// descending lexicographic order with X0 > X1 > ...; on a fixed total degree
// this agrees with graded lex, so iterating a homogeneous form's term map
// visits monomials in grlex order and begin() is the leading term
struct LexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

using TermMap = std::map<Monomial, mpq_class, LexGreater>;

// homogeneous form in num_vars variables; the zero form keeps its declared
// shape (num_vars, degree) with an empty term map
class HomogeneousForm {
 public:
  HomogeneousForm() : nvars_(1), degree_(0) {}
  HomogeneousForm(int num_vars, int degree);

  static HomogeneousForm monomial(int num_vars, const Monomial& exps,
                                  const mpq_class& coeff);
  static HomogeneousForm variable(int num_vars, int index);

  int num_vars() const { return nvars_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  std::size_t term_count() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  void add_term(const Monomial& m, const mpq_class& c);  // accumulates
  mpq_class coeff(const Monomial& m) const;
  const std::pair<const Monomial, mpq_class>& leading() const;  // nonzero form

  HomogeneousForm operator-() const;
  HomogeneousForm operator+(const HomogeneousForm& o) const;
  HomogeneousForm operator-(const HomogeneousForm& o) const;
  HomogeneousForm operator*(const HomogeneousForm& o) const;
  bool operator==(const HomogeneousForm& o) const;
  bool operator!=(const HomogeneousForm& o) const { return !(*this == o); }

  HomogeneousForm scaled(const mpq_class& c) const;
  HomogeneousForm derivative(int var) const;

  mpq_class evaluate(const std::vector<mpq_class>& x) const;
  bool is_integral() const;
  mpq_class max_abs_coeff() const;  // sup norm of the coefficient vector
  mpq_class l1_norm() const;

 private:
  int nvars_;
  int degree_;
  TermMap terms_;
};

HomogeneousForm pow(const HomogeneousForm& a, unsigned long e);

// a = scalar * form with form primitive integral and positive leading
// coefficient; the zero form yields scalar 0, form 0
struct PrimitiveForm {
  HomogeneousForm form;
  mpq_class scalar;
};
PrimitiveForm primitive_part(const HomogeneousForm& a);

// endomorphism of P^N: N+1 forms of common degree d in N+1 variables,
// not all zero (nondegeneracy beyond that is the resultant's job)
struct PolyMap {
  int N = 0;
  int d = 1;
  std::vector<HomogeneousForm> comps;
};
PolyMap make_map(std::vector<HomogeneousForm> comps);

// map = input / scalar with integral comps of joint content 1; scalar > 0
struct PrimitiveMap {
  PolyMap map;
  mpq_class scalar;
};
PrimitiveMap primitive_map(const PolyMap& f);

std::vector<mpq_class> evaluate(const PolyMap& f,
                                const std::vector<mpq_class>& x);
HomogeneousForm pull_back(const PolyMap& f, const HomogeneousForm& phi);
HomogeneousForm jacobian_form(const PolyMap& f);
PolyMap compose(const PolyMap& f, const PolyMap& g);  // f after g

mpq_class map_max_abs_coeff(const PolyMap& f);

}  // namespace divht
