#include "herglotz/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>

namespace herglotz {

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGaussX[8] = {
    -0.96028985649753623, -0.79666647741362674, -0.52553240991632899,
    -0.18343464249564980, 0.18343464249564980,  0.52553240991632899,
    0.79666647741362674,  0.96028985649753623};
constexpr double kGaussW[8] = {
    0.10122853629037626, 0.22238103445337447, 0.31370664587788729,
    0.36268378337836198, 0.36268378337836198, 0.31370664587788729,
    0.22238103445337447, 0.10122853629037626};

// (1 - (1+w)e^-w) / w^2, stable for small w.
double expm1_poly2(double w) {
    if (std::abs(w) < 1e-4) {
        return 0.5 - w / 3.0 + w * w / 8.0 - w * w * w / 30.0;
    }
    return (1.0 - (1.0 + w) * std::exp(-w)) / (w * w);
}

}  // namespace

FractionalOrder::FractionalOrder(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
        throw std::domain_error("fractional order must lie in (0, 1), got " +
                                std::to_string(value));
    }
}

KernelSpec::KernelSpec(KernelFamily family, double p1, double p2, double sigma,
                       std::shared_ptr<const Table> table)
    : family_(family), p1_(p1), p2_(p2), sigma_(sigma), table_(std::move(table)) {}

KernelSpec KernelSpec::power_law(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::domain_error("power-law kernel order must lie in (0, 1), got " +
                                std::to_string(beta));
    }
    return KernelSpec(KernelFamily::PowerLaw, beta, 0.0, 1.0 - beta, nullptr);
}

KernelSpec KernelSpec::exponential(double rate, double scale) {
    if (!(rate > 0.0)) {
        throw std::domain_error("exponential kernel rate must be positive");
    }
    if (!(scale > 0.0)) {
        throw std::domain_error("exponential kernel scale must be positive");
    }
    return KernelSpec(KernelFamily::Exponential, rate, scale, 0.0, nullptr);
}

KernelSpec KernelSpec::tabulated(std::vector<double> s, std::vector<double> k) {
    if (s.size() < 2 || s.size() != k.size()) {
        throw std::domain_error("tabulated kernel needs at least two (s, k) samples");
    }
    auto table = std::make_shared<Table>();
    table->log_s.reserve(s.size());
    table->log_k.reserve(k.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0.0) || !std::isfinite(s[i])) {
            throw std::domain_error("tabulated kernel abscissae must be positive");
        }
        if (i > 0 && !(s[i] > s[i - 1])) {
            throw std::domain_error("tabulated kernel abscissae must be strictly increasing");
        }
        if (!(k[i] > 0.0) || !std::isfinite(k[i])) {
            throw std::domain_error("tabulated kernel values must be strictly positive");
        }
        table->log_s.push_back(std::log(s[i]));
        table->log_k.push_back(std::log(k[i]));
    }
    // Power behaviour of the first segment bounds k near 0; a decaying
    // segment (negative slope) means a weak singularity of that order.
    const double slope0 = (table->log_k[1] - table->log_k[0]) /
                          (table->log_s[1] - table->log_s[0]);
    const double sigma = std::max(0.0, -slope0);
    return KernelSpec(KernelFamily::Tabulated, 0.0, 0.0, sigma, std::move(table));
}

KernelSpec KernelSpec::caputo(const FractionalOrder& alpha) {
    return power_law(1.0 - alpha.value());
}

double KernelSpec::tab_log_eval(double log_s) const {
    const auto& xs = table_->log_s;
    const auto& ys = table_->log_k;
    std::size_t hi = std::upper_bound(xs.begin(), xs.end(), log_s) - xs.begin();
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    const double w = (log_s - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

double KernelSpec::eval(double s) const {
    if (!(s > 0.0)) {
        throw std::domain_error("kernel argument must be positive, got " +
                                std::to_string(s));
    }
    if (family_ == KernelFamily::Tabulated) {
        const double ls = std::log(s);
        if (ls < table_->log_s.front() - 1e-12 || ls > table_->log_s.back() + 1e-12) {
            throw std::domain_error("tabulated kernel evaluated outside sampled range");
        }
        return std::exp(tab_log_eval(ls));
    }
    return eval_extended(s);
}

double KernelSpec::eval_extended(double s) const {
    if (!(s > 0.0)) {
        throw std::domain_error("kernel argument must be positive");
    }
    switch (family_) {
        case KernelFamily::PowerLaw:
            return std::pow(s, p1_ - 1.0) / std::tgamma(p1_);
        case KernelFamily::Exponential:
            return p2_ * std::exp(-p1_ * s);
        case KernelFamily::Tabulated:
            return std::exp(tab_log_eval(std::log(s)));
    }
    return 0.0;  // unreachable
}

double KernelSpec::moment0(double u, double v) const {
    if (!(u >= 0.0 && v > u)) {
        throw std::domain_error("kernel moment interval must satisfy 0 <= u < v");
    }
    switch (family_) {
        case KernelFamily::PowerLaw: {
            const double beta = p1_;
            return (std::pow(v, beta) - std::pow(u, beta)) / std::tgamma(beta + 1.0);
        }
        case KernelFamily::Exponential: {
            const double rho = p1_, c = p2_;
            const double d = v - u;
            return -c * std::exp(-rho * u) * std::expm1(-rho * d) / rho;
        }
        case KernelFamily::Tabulated: {
            double m0, m1;
            tab_moments(u, v, m0, m1);
            return m0;
        }
    }
    return 0.0;
}

double KernelSpec::moment1(double u, double v) const {
    if (!(u >= 0.0 && v > u)) {
        throw std::domain_error("kernel moment interval must satisfy 0 <= u < v");
    }
    switch (family_) {
        case KernelFamily::PowerLaw: {
            const double beta = p1_;
            return (std::pow(v, beta + 1.0) - std::pow(u, beta + 1.0)) /
                   ((beta + 1.0) * std::tgamma(beta));
        }
        case KernelFamily::Exponential: {
            const double rho = p1_, c = p2_;
            const double d = v - u;
            const double a0 = -std::expm1(-rho * d) / rho;
            const double a1 = d * d * expm1_poly2(rho * d);
            return c * std::exp(-rho * u) * (u * a0 + a1);
        }
        case KernelFamily::Tabulated: {
            double m0, m1;
            tab_moments(u, v, m0, m1);
            return m1;
        }
    }
    return 0.0;
}

void KernelSpec::tab_moments(double u, double v, double& m0, double& m1) const {
    // Split [u, v] at sample abscissae so each Gauss rule sees a single
    // log-log-linear (i.e. pure power) piece of the interpolant.
    std::vector<double> cuts;
    cuts.push_back(u);
    for (double ls : table_->log_s) {
        const double s = std::exp(ls);
        if (s > u && s < v) cuts.push_back(s);
    }
    cuts.push_back(v);
    m0 = 0.0;
    m1 = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c], hi = cuts[c + 1];
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int g = 0; g < 8; ++g) {
            const double s = mid + half * kGaussX[g];
            if (!(s > 0.0)) continue;
            const double k = eval_extended(s);
            m0 += half * kGaussW[g] * k;
            m1 += half * kGaussW[g] * s * k;
        }
    }
}

double KernelSpec::beta() const {
    if (family_ != KernelFamily::PowerLaw) {
        throw std::logic_error("beta() is only defined for power-law kernels");
    }
    return p1_;
}

double KernelSpec::rate() const {
    if (family_ != KernelFamily::Exponential) {
        throw std::logic_error("rate() is only defined for exponential kernels");
    }
    return p1_;
}

double KernelSpec::scale() const {
    if (family_ != KernelFamily::Exponential) {
        throw std::logic_error("scale() is only defined for exponential kernels");
    }
    return p2_;
}

std::uint64_t KernelSpec::cache_token() const noexcept {
    // Tokens are assigned lazily per distinct parameter triple so that
    // copies (and equal re-constructions) share cached weights.
    static std::atomic<std::uint64_t> pl_salt{0};
    (void)pl_salt;
    switch (family_) {
        case KernelFamily::PowerLaw: {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(p1_));
            std::memcpy(&bits, &p1_, sizeof(bits));
            return (bits << 2) | 1u;
        }
        case KernelFamily::Exponential: {
            std::uint64_t b1, b2;
            std::memcpy(&b1, &p1_, sizeof(b1));
            std::memcpy(&b2, &p2_, sizeof(b2));
            return ((b1 ^ (b2 * 0x9e3779b97f4a7c15ULL)) << 2) | 2u;
        }
        case KernelFamily::Tabulated: {
            const auto addr = reinterpret_cast<std::uintptr_t>(table_.get());
            return (static_cast<std::uint64_t>(addr) << 2) | 3u;
        }
    }
    return 0;
}

ParameterSet::ParameterSet(double a_, double b_, double p_, double q_)
    : a(a_), b(b_), p(p_), q(q_) {
    if (!(a < b)) {
        throw std::domain_error("parameter set requires a < b");
    }
    if (p == 0.0 && q == 0.0) {
        throw std::domain_error("parameter set weights (p, q) must not both vanish");
    }
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(p) || !std::isfinite(q)) {
        throw std::domain_error("parameter set entries must be finite");
    }
}

ParameterSet adjoint(const ParameterSet& pset) {
    return ParameterSet(pset.a, pset.b, pset.q, pset.p);
}

bool MonotonicityReport::passed(double tolerance) const {
    for (const auto& e : entries) {
        if (e.worst_violation > tolerance) return false;
    }
    return true;
}

MonotonicityReport check_complete_monotonicity(const KernelSpec& kernel,
                                               double s_min, double s_max,
                                               int n_samples, int max_order) {
    if (!(s_min > 0.0 && s_max > s_min)) {
        throw std::domain_error("monotonicity check requires 0 < s_min < s_max");
    }
    if (n_samples < 2) {
        throw std::domain_error("monotonicity check requires at least two samples");
    }
    if (max_order < 0 || max_order > 4) {
        throw std::domain_error("monotonicity check supports derivative orders 0..4");
    }

    const double ratio = std::pow(s_max / s_min, 1.0 / (n_samples - 1));
    constexpr double rel_step = 0.02;

    MonotonicityReport report;
    for (int order = 0; order <= max_order; ++order) {
        MonotonicityReport::Entry entry{order, 0.0, s_min};
        double s = s_min;
        for (int i = 0; i < n_samples; ++i, s *= ratio) {
            const double h = rel_step * s;
            // Central stencil for the order-th derivative: n+1 points,
            // binomial coefficients, O(h^2) truncation.
            double fd = 0.0;
            double coeff = 1.0;
            for (int j = 0; j <= order; ++j) {
                const double x = s + (0.5 * order - j) * h;
                fd += coeff * kernel.eval_extended(x);
                coeff *= -static_cast<double>(order - j) / (j + 1);
            }
            fd /= std::pow(h, order);

            const double signed_value = (order % 2 == 0) ? fd : -fd;
            if (signed_value < 0.0) {
                const double local_scale =
                    std::abs(fd) + kernel.eval_extended(s) / std::pow(s, order) +
                    std::numeric_limits<double>::min();
                const double violation = -signed_value / local_scale;
                if (violation > entry.worst_violation) {
                    entry.worst_violation = violation;
                    entry.at_s = s;
                }
            }
        }
        report.entries.push_back(entry);
    }
    return report;
}

}  // namespace herglotz
