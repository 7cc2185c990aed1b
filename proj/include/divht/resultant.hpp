#pragma once
#include "divht/det.hpp"
#include "divht/form.hpp"

namespace divht {

// classical elimination matrix for n+1 forms of degrees d_0..d_n in n+1
// variables, at working degree t = sum(d_i - 1) + 1.  Row i multiplies form
// class(cols[i]) by cols[i] / X_class^d_class, so a diagonal power system
// produces the identity matrix and the normalization Res(X0^d0,...,Xn^dn)=1
struct MacaulayLayout {
  int nvars = 0;
  std::vector<int> degrees;
  int t = 0;
  std::vector<Monomial> cols;  // degree-t monomials, grlex descending
  std::vector<int> col_class;  // least i with cols[j][i] >= degrees[i]
  std::vector<Monomial> multiplier;  // cols[j] / X_class^d_class
  std::vector<char> reduced;   // divisible by exactly one X_i^{d_i}
  std::vector<int> minor_idx;  // positions of non-reduced columns/rows

  int col_index(const Monomial& m) const;  // -1 if absent
};

MacaulayLayout macaulay_layout(const std::vector<int>& degrees);

// rows/cols follow the layout; forms must be integral
ZMatrix macaulay_matrix(const MacaulayLayout& layout,
                        const std::vector<HomogeneousForm>& forms);

// resultant of nvars forms in nvars variables with respect to the given
// degrees; zero iff the system has a common projective zero.  Degenerate
// minor determinants are escaped through unimodular shears, then through an
// exact gcd over form reorderings (which pins the value up to sign only)
mpq_class resultant(const std::vector<HomogeneousForm>& forms,
                    const std::vector<int>& degrees);

mpq_class resultant(const PolyMap& f);

// Sylvester determinant for two binary forms, taken with respect to their
// declared degrees; agrees with the Macaulay normalization
mpq_class sylvester_resultant(const HomogeneousForm& a,
                              const HomogeneousForm& b);

// direct image of the cycle cut by phi under f, of degree d^N * deg(phi);
// res_power * form reproduces the elimination form of the graph system
struct PushforwardResult {
  HomogeneousForm form;
  mpq_class res_power;  // Res(f)^{deg phi}
};
PushforwardResult push_forward(const PolyMap& f, const HomogeneousForm& phi);

// N=1 closed form for a point divisor: the image line form to the d-th
// power over Res(f); cross-checked against push_forward exactly
HomogeneousForm push_forward_point_p1(const PolyMap& f,
                                      const std::vector<mpq_class>& q);

// one divisor-level iteration step: next cuts f_* of the divisor cut by
// phi, and f_* phi == scalar * next^d exactly
struct DivisorStep {
  HomogeneousForm next;  // primitive integral, positive leading coefficient
  mpq_class scalar;
};
DivisorStep push_divisor(const PolyMap& f, const HomogeneousForm& phi);

// exact d-th root of a form known to be a perfect power (leading
// coefficient positive); throws InternalError otherwise
HomogeneousForm form_dth_root(const HomogeneousForm& u, int d);

}  // namespace divht
