#pragma once

#include <vector>

#include "divht/form.hpp"
#include "divht/interval.hpp"

namespace divht {

// log max |c| over the coprime integer lift of the coordinate tuple
Interval weil_height_point(const std::vector<mpq_class>& q);

// same, over the joint coefficient tuple of the map
Interval weil_height_map(const PolyMap& f);

// global height of the divisor cut by phi: finite places vanish on the
// primitive part, what remains is the archimedean mahler bracket
Interval philippon_height(const HomogeneousForm& phi);

struct ErrorBudget {
  int N = 0;
  int d = 0;
  Interval h;        // weil_height_map of the primitive lift
  Interval c8, c9;
  Interval b_upper;  // one-sided per-degree budgets:
  Interval b_lower;  //   hhat - h(iterate) in [-b_lower*e, +b_upper*e]
  Interval refined;  // max of the two, used for depth selection
  mpz_class C1;
  mpz_class C2;
  Interval log_C2;
  Interval coarse;   // C1*h + C2
};

ErrorBudget error_budget(const PolyMap& f);

struct HeightReport {
  Interval value;
  int k_used = 0;
  bool converged = false;
  bool cycle = false;          // exact value via orbit repetition
  std::vector<double> raw;     // uncertified per-depth estimates
  double width = 0;            // achieved
  double width_target = 0;     // requested eps
};

struct DivisorHeightReport {
  Interval naive;
  HeightReport canonical;
  long degree = 0;
  ErrorBudget budget;
  bool consistent_with_zero = false;
};

DivisorHeightReport canonical_height_divisor(const PolyMap& f,
                                             const HomogeneousForm& phi,
                                             const mpq_class& eps,
                                             int max_k = -1);

HeightReport canonical_height_point(const PolyMap& f,
                                    const std::vector<mpq_class>& q,
                                    const mpq_class& eps, int max_k = -1);

// canonical height of the critical divisor det(DF)
DivisorHeightReport critical_height(const PolyMap& f, const mpq_class& eps,
                                    int max_k = -1);

struct TheoremCheck {
  DivisorHeightReport report;
  Interval diff;        // canonical minus naive
  Interval refined_lo;  // -b_lower * deg
  Interval refined_hi;  // +b_upper * deg
  Interval coarse;      // (C1*h + C2) * deg
  bool ok_refined = true;
  bool ok_coarse = true;
  bool ok = true;
};

// enclosure-safe audit of the height-comparison bounds: a failure is
// reported only when the intervals prove a violation
TheoremCheck theorem1_check(const PolyMap& f, const HomogeneousForm& phi);

}  // namespace divht
