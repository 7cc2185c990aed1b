#pragma once
#include <string>
#include <vector>

#include "divht/form.hpp"

namespace divht {

// accepts sums/products/powers of rationals and variables X0..X{n-1}
// (prefix letter X, x, Y, or y), with parentheses; the expanded polynomial
// must be homogeneous
HomogeneousForm parse_form(const std::string& text, int num_vars);

// comma-separated rationals, e.g. "2, 1" or "1/3,4,-2"
std::vector<mpq_class> parse_point(const std::string& text, int num_vars);

// one component per entry, each of degree d in N+1 variables
PolyMap parse_map(const std::vector<std::string>& comps, int N, int d);

mpq_class parse_rational(const std::string& text);  // "3", "-1/4", "2.5"

std::string rational_to_string(const mpq_class& q);
std::string form_to_string(const HomogeneousForm& f,
                           const std::string& var_prefix = "X");

}  // namespace divht
