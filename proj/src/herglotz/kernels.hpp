#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace herglotz {

/// Fractional order restricted to the open interval (0, 1). The endpoint
/// cases are handled by the classical operator mode, not by this type.
class FractionalOrder {
public:
    explicit FractionalOrder(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

enum class KernelFamily { PowerLaw, Exponential, Tabulated };

/// A memory kernel k(s) on s > 0 together with the metadata the product
/// integration in `operators` needs: the singularity exponent sigma such
/// that k(s) * s^sigma stays bounded as s -> 0+, and exact (or high-order)
/// integral moments over subintervals.
///
/// PowerLaw(beta):      k(s) = s^(beta-1) / Gamma(beta),  sigma = 1 - beta
/// Exponential(rho, c): k(s) = c * exp(-rho * s),         sigma = 0
/// Tabulated:           piecewise log-log interpolation of positive samples
class KernelSpec {
public:
    static KernelSpec power_law(double beta);
    static KernelSpec exponential(double rate, double scale);
    /// Samples (s_i, k_i) with s strictly increasing and k strictly positive.
    /// Interpolation is linear in (log s, log k); outside the sampled range
    /// the nearest segment's slope is extended.
    static KernelSpec tabulated(std::vector<double> s, std::vector<double> k);
    /// Kernel that makes K^(1-alpha)[Df] the standard Caputo derivative of
    /// order alpha: power law with beta = 1 - alpha, i.e.
    /// k(s) = s^(-alpha) / Gamma(1-alpha).
    static KernelSpec caputo(const FractionalOrder& alpha);

    KernelFamily family() const noexcept { return family_; }
    double singularity_exponent() const noexcept { return sigma_; }

    /// k(s) for s > 0. Tabulated kernels reject s outside the sampled range.
    double eval(double s) const;
    /// Like eval(), but extends tabulated kernels beyond the sampled range.
    /// Used by quadrature and by monotonicity sampling near interval edges.
    double eval_extended(double s) const;

    /// Moments over [u, v] with 0 <= u < v: moment0 = integral of k,
    /// moment1 = integral of s*k. Closed-form for PowerLaw and Exponential,
    /// Gauss-Legendre per log-log segment for Tabulated.
    double moment0(double u, double v) const;
    double moment1(double u, double v) const;

    // Family parameters (throw std::logic_error when queried across families).
    double beta() const;
    double rate() const;
    double scale() const;

    /// Identity token for weight caching: distinct kernels compare unequal,
    /// copies of the same kernel compare equal.
    std::uint64_t cache_token() const noexcept;

private:
    struct Table {
        std::vector<double> log_s;
        std::vector<double> log_k;
    };

    KernelSpec(KernelFamily family, double p1, double p2, double sigma,
               std::shared_ptr<const Table> table);

    double tab_log_eval(double log_s) const;
    void tab_moments(double u, double v, double& m0, double& m1) const;

    KernelFamily family_;
    double p1_ = 0.0;  // beta | rate
    double p2_ = 0.0;  // unused | scale
    double sigma_ = 0.0;
    std::shared_ptr<const Table> table_;
};

/// Interval endpoints plus the weights of the left (history) and right
/// (anticipation) kernel integrals.
struct ParameterSet {
    double a;
    double b;
    double p;
    double q;

    ParameterSet(double a_, double b_, double p_, double q_);

    bool left_only() const noexcept { return q == 0.0; }
    bool right_only() const noexcept { return p == 0.0; }
    bool one_sided() const noexcept { return left_only() || right_only(); }
};

/// Swap the left/right weights: <a,b,p,q> -> <a,b,q,p>. An involution.
ParameterSet adjoint(const ParameterSet& pset);

/// Sampled complete-monotonicity check: estimates k^(n) on a geometric grid
/// by central finite differences and records the worst violation of
/// (-1)^n k^(n)(s) >= 0, normalized by the local derivative scale.
struct MonotonicityReport {
    struct Entry {
        int order;
        double worst_violation;  // relative; 0 when the sign pattern holds
        double at_s;             // sample where the worst violation occurred
    };
    std::vector<Entry> entries;

    bool passed(double tolerance = 1e-6) const;
};

MonotonicityReport check_complete_monotonicity(const KernelSpec& kernel,
                                               double s_min, double s_max,
                                               int n_samples, int max_order);

}  // namespace herglotz
