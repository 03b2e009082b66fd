#pragma once

#include "herglotz/problem.hpp"

namespace herglotz {

/// L = 0.5*m*|v|^2 - 0.5*k*|x|^2 + lambda0*z (any dimension).
Lagrangian oscillator_lagrangian(double m, double k, double lambda0);

/// L = 0.5*v2*|v|^2 + 0.5*x2*|x|^2 + z_coef*z + constant.
Lagrangian quadratic_lagrangian(double v2, double x2, double z_coef,
                                double constant);

/// One monomial coef * t^pt * prod_j x_j^px[j] * prod_j v_j^pv[j] * z^pz of a
/// polynomial Lagrangian; exponents are non-negative integers.
struct PolynomialTerm {
    double coef = 0.0;
    int pt = 0;
    std::vector<int> px;
    std::vector<int> pv;
    int pz = 0;
};

/// Polynomial in (t, x, v, z) with analytic partials derived from the term
/// table.
Lagrangian polynomial_lagrangian(int dim, std::vector<PolynomialTerm> terms);

}  // namespace herglotz
