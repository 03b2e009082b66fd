#pragma once

#include "herglotz/problem.hpp"

namespace herglotz {

struct SolveOptions {
    int max_iterations = 1000;
    double gradient_tolerance = 1e-6;  // sup norm of the objective gradient
    double step_tolerance = 1e-11;     // relative sup norm of the accepted step
    double fd_step = 1e-6;             // relative step of the objective gradient

    enum class Guess { LinearInterp, ConstantLeft, Provided };
    Guess initial_guess = Guess::LinearInterp;
    std::optional<GridFunction> provided_guess;

    int memory = 10;           // quasi-Newton correction pairs
    int max_line_search = 50;  // backtracking trials per iteration

    void validate() const;
};

/// Thrown when the objective cannot be evaluated at the initial guess.
class SetupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveResult {
    explicit SolveResult(HerglotzEvaluation ev) : evaluation(std::move(ev)) {}

    HerglotzEvaluation evaluation;
    bool converged = false;
    int iterations = 0;
    double final_gradient_norm = 0.0;
    double final_step_norm = 0.0;
    int objective_evaluations = 0;
    bool line_search_failed = false;
    std::vector<double> el_residual_supnorm;  // interior sup norm per component
    std::optional<std::vector<double>> transversality_residuals;

    double z_b() const { return evaluation.z_b; }
};

/// Direct transcription: the decision variables are all interior node values
/// plus any free endpoint values; the objective is +-z(b); the optimizer is
/// a limited-memory quasi-Newton method with a backtracking line search
/// (sufficient decrease), gradients by central finite differences.
SolveResult solve_direct(const HerglotzProblem& prob, const Grid& grid,
                         const SolveOptions& opts);

/// Worst first-order improvement found by perturbing single free node values
/// of x by +-delta (relative). Zero or tiny at a stationary point.
double stationarity_probe(const HerglotzProblem& prob, const GridFunction& x,
                          double delta);

struct ConvergenceLevel {
    int n_nodes = 0;
    double z_b = 0.0;
    bool converged = false;
    double gradient_norm = 0.0;
    double el_supnorm = 0.0;        // max over components, interior nodes
    double diff_to_previous = 0.0;  // L-inf at shared nodes; 0 for first level
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    bool residual_nonincreasing = true;

    /// log2 |z1-z2| / |z2-z3| over the last three levels; NaN if undefined.
    double observed_order() const;
};

/// Solves on nested grids N, 2N-1, 4N-3 (warm-starting each level from the
/// previous solution) and reports the z_b sequence, trajectory differences
/// and residual sup norms.
ConvergenceReport refine_and_verify(const HerglotzProblem& prob, const Grid& grid,
                                    const SolveOptions& opts, int levels = 3);

}  // namespace herglotz
