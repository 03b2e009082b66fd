#pragma once

#include "herglotz/problem.hpp"

namespace herglotz {

/// First-order generator xi_j(t, x) of a one-parameter trajectory
/// transformation x_j -> x_j + s*xi_j(t, x) + o(s).
struct TransformationFamily {
    using Generator = std::function<void(double t, std::span<const double> x,
                                         std::span<double> out)>;
    Generator xi;

    /// Constant shift along `direction` (defaults to all ones).
    static TransformationFamily translation(int dim,
                                            std::vector<double> direction = {});
    /// xi = x (infinitesimal scaling).
    static TransformationFamily scaling();
    /// xi(t) read off a grid function (x-independent), linear interpolation.
    static TransformationFamily from_table(GridFunction table);
};

/// Samples xi along a trajectory into a grid function.
GridFunction sample_generator(const TransformationFamily& family,
                              const GridFunction& x);

/// d/ds z[x + s*xi(t, x(t)); b] at s = 0, by central differences in s.
/// Near zero means the family leaves the functional invariant at x.
double invariance_defect(const HerglotzProblem& prob, const GridFunction& x,
                         const TransformationFamily& family, double s_step);

/// The bilinear operator O[f, g] = f * B[g] - g * A*[f] on scalar grid
/// functions; in classical mode with a left-sided set this is d(fg)/dt.
GridFunction noether_operator(const GridFunction& f, const GridFunction& g,
                              const OperatorConfig& cfg);

struct NoetherResidual {
    GridFunction pointwise;  // sum over components of O[lambda*dL/dv_j, xi_j]
    double supnorm;          // default summary, residual_sup_norm()
    double integral;         // trapezoid over [a, b]
};

/// The conserved-quantity defect along a candidate solution: vanishes (up to
/// discretization) when ev solves the Euler-Lagrange equations and xi leaves
/// z invariant.
NoetherResidual noether_residual(const HerglotzProblem& prob,
                                 const HerglotzEvaluation& ev,
                                 const TransformationFamily& family);

/// The variational identity behind the Noether theorem, valid along *any*
/// trajectory:
///   theta(b)*lambda(b) = int_a^b sum_j (dL/dx_j*xi_j + dL/dv_j*B[xi_j]) * lambda dt
/// with theta(b) estimated by invariance_defect.
struct VariationalIdentity {
    double lhs;
    double rhs;
    double rel_defect;  // |lhs-rhs| / (1 + max(|lhs|, |rhs|))
};

VariationalIdentity variational_identity(const HerglotzProblem& prob,
                                         const GridFunction& x,
                                         const TransformationFamily& family,
                                         double s_step);

}  // namespace herglotz
