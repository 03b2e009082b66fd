#pragma once

#include <string>

#include "herglotz/solver.hpp"

namespace herglotz {

/// Damped oscillator with memory: L = 0.5*m*v^2 - 0.5*k*x^2 + lambda0*z on
/// [0, b] with the left-sided parameter set <0, b, 1, 0>. alpha absent means
/// the classical (memoryless) mode.
struct OscillatorParams {
    double m = 1.0;
    double k = 1.0;
    double lambda0 = 0.0;
    std::optional<double> alpha;       // in (0,1); nullopt = classical
    std::optional<KernelSpec> kernel;  // default: power-law kernel for alpha
    double b = 1.0;
    double x0 = 0.0;
    std::optional<double> xb;  // absent = free endpoint
    double z0 = 0.0;

    void validate() const;
};

HerglotzProblem oscillator_problem(const OscillatorParams& params);

/// Equation-of-motion residual in its specialized form
///   m * A*[exp(-lambda0 t) * v] - k * exp(-lambda0 t) * x,
/// algebraically identical to the generic Euler-Lagrange residual for this
/// Lagrangian (lambda(t) = exp(-lambda0 t) exactly).
GridFunction oscillator_el_residual(const OscillatorParams& params,
                                    const HerglotzEvaluation& ev);

/// Classical damped-oscillator residual m*d/dt(exp(-lambda0 t)*x') +
/// k*exp(-lambda0 t)*x using the same discrete derivative. In classical mode
/// the specialized residual above is its exact negative.
GridFunction classical_damped_residual(const OscillatorParams& params,
                                       const GridFunction& x);

/// Closed-form solution of m*x'' - m*lambda0*x' + k*x = 0 fitted to x(0)=x0
/// and either x(b)=xb or (free endpoint) x'(b)=0. Handles real, complex and
/// repeated characteristic roots.
std::function<double(double)> classical_reference(const OscillatorParams& params);

struct SweepRow {
    bool classical = false;
    double alpha = 0.0;
    bool solved = false;
    std::string error;  // non-empty when the per-alpha solve failed
    double z_b = 0.0;
    bool converged = false;
    double gradient_norm = 0.0;
    double el_supnorm = 0.0;
    double diff_to_previous = 0.0;   // L-inf to the previous alpha row
    double diff_to_classical = 0.0;  // L-inf to the classical reference
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<GridFunction> trajectories;       // one per row, same order
    std::optional<GridFunction> classical_curve;  // sampled reference
};

/// Solves the oscillator for each fractional order, appends the classical
/// reference row, and reports continuity diagnostics. Per-alpha failures are
/// recorded and the sweep continues. jobs > 1 runs entries concurrently.
SweepTable alpha_sweep(const OscillatorParams& params,
                       const std::vector<double>& alphas, int n_nodes,
                       const SolveOptions& opts, int jobs = 1);

}  // namespace herglotz
