#pragma once

#include <optional>

#include "herglotz/grid.hpp"
#include "herglotz/kernels.hpp"

namespace herglotz {

/// Configuration for the nonlocal operators
///   K[f](x) = p * int_a^x k(x-t) f(t) dt + q * int_x^b k(t-x) f(t) dt,
///   B = K o D  (Caputo-type),  A = D o K  (Riemann-Liouville-type).
///
/// In classical mode K degenerates to the weighted identity, so B becomes
/// w*D and A becomes +p*D (left-sided) or -q*D (right-sided); classical mode
/// therefore requires a one-sided parameter set.
struct OperatorConfig {
    double alpha = 0.5;       // meaningful only when classical_mode is false
    bool classical_mode = false;
    std::optional<KernelSpec> kernel;  // absent in classical mode
    ParameterSet pset;

    static OperatorConfig fractional(FractionalOrder alpha, KernelSpec kernel,
                                     ParameterSet pset);
    static OperatorConfig classical(ParameterSet pset);

    /// Same operator data over the adjoint parameter set <a,b,q,p>.
    OperatorConfig with_adjoint_pset() const;

    Grid make_grid(int n_nodes) const { return Grid(pset.a, pset.b, n_nodes); }
};

GridFunction apply_K(const OperatorConfig& cfg, const GridFunction& f);
GridFunction apply_B(const OperatorConfig& cfg, const GridFunction& f);

/// Riemann-Liouville-type derivative with the orientation of each part
/// built in: A_P = p * D(K_left) - q * D(K_right). The right-sided part
/// carries the minus sign of the conventional right-sided derivative; its
/// classical limit is then -q*D exactly, matching the left limit +p*D.
GridFunction apply_A(const OperatorConfig& cfg, const GridFunction& f);

/// Both sides of the integration-by-parts identity
///   int_a^b g * B[f] dt = [f * K*[g]]_a^b - int_a^b f * A*[g] dt
/// evaluated with the discrete operators (K*, A* over the adjoint set).
/// The boundary bracket is oriented "value at b minus value at a".
struct IbpCheck {
    double lhs;
    double rhs;
    double boundary_term;
    double residual;  // |lhs - rhs| / (1 + |lhs|)
};

IbpCheck ibp_check(const OperatorConfig& cfg, const GridFunction& f,
                   const GridFunction& g);

namespace detail {

/// Product-integration weights for a difference kernel on a uniform grid.
///
/// Replacing f by its piecewise-linear interpolant turns each subinterval
/// contribution to int k(s) f ds over I_m = [(m-1)h, mh] into
///   rise(m) * f_far + fall(m) * f_near,
/// where rise(m) = (M1 - (m-1)h*M0)/h, fall(m) = (mh*M0 - M1)/h and
/// M0, M1 are the kernel moments over I_m ("far" is the node m steps from
/// the evaluation point, "near" is m-1 steps away). The weights depend only
/// on m, so one O(N) table serves the whole O(N^2) application; tables are
/// cached per (kernel, h, n).
class ConvolutionWeights {
public:
    static std::shared_ptr<const ConvolutionWeights> get(const KernelSpec& kernel,
                                                         double h, int n_nodes);

    double rise(int m) const { return rise_[m - 1]; }
    double fall(int m) const { return fall_[m - 1]; }

private:
    std::vector<double> rise_;
    std::vector<double> fall_;
};

}  // namespace detail

}  // namespace herglotz
