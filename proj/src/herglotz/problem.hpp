#pragma once

#include <functional>
#include <optional>
#include <span>

#include "herglotz/operators.hpp"

namespace herglotz {

/// Lagrangian L(t, x, v, z) with analytic partials. v stands for the
/// generalized velocity B[x] (or the ordinary derivative in classical mode).
struct Lagrangian {
    using Value =
        std::function<double(double t, std::span<const double> x,
                             std::span<const double> v, double z)>;
    using Gradient =
        std::function<void(double t, std::span<const double> x,
                           std::span<const double> v, double z,
                           std::span<double> out)>;

    Value value;
    Gradient dx;
    Gradient dv;
    Value dz;
};

enum class Extremum { Minimize, Maximize };

/// Thrown when the Lagrangian produces a non-finite value along a trajectory.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, int node)
        : std::runtime_error(what + " at node " + std::to_string(node)),
          node_(node) {}
    int node() const noexcept { return node_; }

private:
    int node_;
};

/// The variational problem: extremize the terminal value z(b) of
///   z'(t) = L(t, x(t), B[x](t), z(t)),  z(a) = z_a,
/// over trajectories x with x(a) = x_a and, componentwise, either a fixed
/// value at b or a free endpoint.
class HerglotzProblem {
public:
    HerglotzProblem(int dim, Lagrangian lagrangian, OperatorConfig op_config,
                    std::vector<double> x_a,
                    std::vector<std::optional<double>> x_b, double z_a,
                    Extremum direction = Extremum::Minimize);

    int dim() const noexcept { return dim_; }
    const Lagrangian& lagrangian() const noexcept { return lagrangian_; }
    const OperatorConfig& op_config() const noexcept { return op_config_; }
    const std::vector<double>& x_a() const noexcept { return x_a_; }
    const std::vector<std::optional<double>>& x_b() const noexcept { return x_b_; }
    double z_a() const noexcept { return z_a_; }
    Extremum direction() const noexcept { return direction_; }

    int free_endpoint_count() const;
    std::vector<int> free_endpoint_components() const;

private:
    int dim_;
    Lagrangian lagrangian_;
    OperatorConfig op_config_;
    std::vector<double> x_a_;
    std::vector<std::optional<double>> x_b_;
    double z_a_;
    Extremum direction_;
};

/// Trajectory bundle along one candidate x: the generalized velocity,
/// the z-trajectory (Heun-integrated), its terminal value, and the
/// integrating factor lambda(t) = exp(-int_a^t dL/dz).
struct HerglotzEvaluation {
    GridFunction x;
    GridFunction v;
    GridFunction z;
    GridFunction lambda;
    double z_b;
};

/// Evaluates z[x; .]. Checks that x matches the problem's boundary data.
HerglotzEvaluation evaluate_z(const HerglotzProblem& prob, const GridFunction& x);

/// Same evaluation without the boundary-data check (used for variations
/// x + s*xi that intentionally move the endpoints).
HerglotzEvaluation evaluate_z_unchecked(const HerglotzProblem& prob,
                                        const GridFunction& x);

/// Terminal z only, for a given x and precomputed v = B[x]; the hot path of
/// the direct solver. Throws EvaluationError on non-finite Lagrangian values.
double terminal_z(const HerglotzProblem& prob, const GridFunction& x,
                  const GridFunction& v);

/// Pointwise defect of lambda*dL/dx_j + A*[lambda*dL/dv_j], one component
/// per j. The full profile is returned; residual_sup_norm() is the default
/// summary.
GridFunction el_residual(const HerglotzProblem& prob, const HerglotzEvaluation& ev);

/// Nodes excluded per side by the default residual summary: a band of 5% of
/// the interval (at least one node). The A-differentiation is least accurate
/// there: the one-sided stencils and the empty-range endpoint values of the
/// inner integral feed the first and last few output nodes, and candidate
/// extremals of fractional problems carry t^alpha boundary layers that the
/// nodal operators under-resolve.
int residual_margin(int n_nodes);

/// Sup norm of a residual profile away from the boundary bands, the default
/// reported summary (componentwise max).
double residual_sup_norm(const GridFunction& r);

/// Sup norm over the boundary bands themselves, reported separately.
double residual_boundary_sup_norm(const GridFunction& r);

/// Natural-boundary-condition value K*[lambda*dL/dv_j](b) per free
/// component. The right-sided part at b is the one-sided limit, estimated by
/// (b-x)^(1-sigma)-aware extrapolation from the last interior nodes.
std::vector<double> transversality_residual(const HerglotzProblem& prob,
                                            const HerglotzEvaluation& ev);

struct PartialsReport {
    double worst_dx = 0.0;
    double worst_dv = 0.0;
    double worst_dz = 0.0;
    double worst() const { return std::max(worst_dx, std::max(worst_dv, worst_dz)); }
};

/// Probes the supplied partials against central finite differences of the
/// Lagrangian at seeded random states.
PartialsReport check_partials(const HerglotzProblem& prob, int n_probes,
                              std::uint64_t seed = 20240811u);

}  // namespace herglotz
