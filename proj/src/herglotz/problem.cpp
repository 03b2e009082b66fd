#include "herglotz/problem.hpp"

#include <cmath>
#include <random>

namespace herglotz {

HerglotzProblem::HerglotzProblem(int dim, Lagrangian lagrangian,
                                 OperatorConfig op_config, std::vector<double> x_a,
                                 std::vector<std::optional<double>> x_b, double z_a,
                                 Extremum direction)
    : dim_(dim),
      lagrangian_(std::move(lagrangian)),
      op_config_(std::move(op_config)),
      x_a_(std::move(x_a)),
      x_b_(std::move(x_b)),
      z_a_(z_a),
      direction_(direction) {
    if (dim_ < 1) {
        throw std::domain_error("problem dimension must be >= 1");
    }
    if (x_a_.size() != static_cast<std::size_t>(dim_) ||
        x_b_.size() != static_cast<std::size_t>(dim_)) {
        throw std::invalid_argument("boundary data size does not match dimension");
    }
    if (!lagrangian_.value || !lagrangian_.dx || !lagrangian_.dv || !lagrangian_.dz) {
        throw std::invalid_argument("Lagrangian is missing an evaluator");
    }
    if (!std::isfinite(z_a_)) {
        throw std::invalid_argument("z(a) must be finite");
    }
    for (double v : x_a_) {
        if (!std::isfinite(v)) throw std::invalid_argument("x(a) must be finite");
    }
    for (const auto& v : x_b_) {
        if (v && !std::isfinite(*v)) throw std::invalid_argument("x(b) must be finite");
    }
}

int HerglotzProblem::free_endpoint_count() const {
    int n = 0;
    for (const auto& v : x_b_) {
        if (!v) ++n;
    }
    return n;
}

std::vector<int> HerglotzProblem::free_endpoint_components() const {
    std::vector<int> out;
    for (int j = 0; j < dim_; ++j) {
        if (!x_b_[j]) out.push_back(j);
    }
    return out;
}

namespace {

void check_boundary_data(const HerglotzProblem& prob, const GridFunction& x) {
    const int n = x.n_nodes();
    for (int j = 0; j < prob.dim(); ++j) {
        const double tol_a = 1e-9 * (1.0 + std::abs(prob.x_a()[j]));
        if (std::abs(x(0, j) - prob.x_a()[j]) > tol_a) {
            throw std::invalid_argument("trajectory violates x(a) boundary data");
        }
        if (prob.x_b()[j]) {
            const double tol_b = 1e-9 * (1.0 + std::abs(*prob.x_b()[j]));
            if (std::abs(x(n - 1, j) - *prob.x_b()[j]) > tol_b) {
                throw std::invalid_argument("trajectory violates x(b) boundary data");
            }
        }
    }
}

HerglotzEvaluation evaluate_impl(const HerglotzProblem& prob, const GridFunction& x) {
    if (x.dim() != prob.dim()) {
        throw std::invalid_argument("trajectory dimension does not match problem");
    }
    const GridFunction v = apply_B(prob.op_config(), x);

    const int n = x.n_nodes();
    const Grid& grid = x.grid();
    const double h = grid.h();
    const auto& L = prob.lagrangian();

    GridFunction z(grid, 1);
    z(0) = prob.z_a();
    double L_here = L.value(grid.node(0), x.row(0), v.row(0), z(0));
    if (!std::isfinite(L_here)) {
        throw EvaluationError("non-finite Lagrangian value", 0);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double t_next = grid.node(i + 1);
        const double z_pred = z(i) + h * L_here;
        const double L_pred = L.value(t_next, x.row(i + 1), v.row(i + 1), z_pred);
        z(i + 1) = z(i) + 0.5 * h * (L_here + L_pred);
        if (!std::isfinite(z(i + 1))) {
            throw EvaluationError("non-finite Lagrangian value", i + 1);
        }
        L_here = L.value(t_next, x.row(i + 1), v.row(i + 1), z(i + 1));
        if (!std::isfinite(L_here)) {
            throw EvaluationError("non-finite Lagrangian value", i + 1);
        }
    }

    GridFunction dz(grid, 1);
    for (int i = 0; i < n; ++i) {
        dz(i) = L.dz(grid.node(i), x.row(i), v.row(i), z(i));
        if (!std::isfinite(dz(i))) {
            throw EvaluationError("non-finite dL/dz value", i);
        }
    }
    GridFunction lambda = cumulative_integral(dz);
    for (int i = 0; i < n; ++i) lambda(i) = std::exp(-lambda(i));

    const double z_b = z(n - 1);
    return HerglotzEvaluation{x, v, std::move(z), std::move(lambda), z_b};
}

}  // namespace

HerglotzEvaluation evaluate_z(const HerglotzProblem& prob, const GridFunction& x) {
    check_boundary_data(prob, x);
    return evaluate_impl(prob, x);
}

HerglotzEvaluation evaluate_z_unchecked(const HerglotzProblem& prob,
                                        const GridFunction& x) {
    return evaluate_impl(prob, x);
}

double terminal_z(const HerglotzProblem& prob, const GridFunction& x,
                  const GridFunction& v) {
    const int n = x.n_nodes();
    const Grid& grid = x.grid();
    const double h = grid.h();
    const auto& L = prob.lagrangian();

    double z = prob.z_a();
    double L_here = L.value(grid.node(0), x.row(0), v.row(0), z);
    if (!std::isfinite(L_here)) {
        throw EvaluationError("non-finite Lagrangian value", 0);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double t_next = grid.node(i + 1);
        const double z_pred = z + h * L_here;
        const double L_pred = L.value(t_next, x.row(i + 1), v.row(i + 1), z_pred);
        z += 0.5 * h * (L_here + L_pred);
        if (!std::isfinite(z)) {
            throw EvaluationError("non-finite z value", i + 1);
        }
        L_here = L.value(t_next, x.row(i + 1), v.row(i + 1), z);
        if (!std::isfinite(L_here)) {
            throw EvaluationError("non-finite Lagrangian value", i + 1);
        }
    }
    return z;
}

GridFunction el_residual(const HerglotzProblem& prob, const HerglotzEvaluation& ev) {
    const int n = ev.x.n_nodes();
    const int d = prob.dim();
    const Grid& grid = ev.x.grid();
    const auto& L = prob.lagrangian();
    const OperatorConfig adj = prob.op_config().with_adjoint_pset();

    GridFunction lx(grid, d), lv(grid, d);
    std::vector<double> buf(d);
    for (int i = 0; i < n; ++i) {
        const double t = grid.node(i);
        L.dx(t, ev.x.row(i), ev.v.row(i), ev.z(i), buf);
        for (int j = 0; j < d; ++j) lx(i, j) = buf[j];
        L.dv(t, ev.x.row(i), ev.v.row(i), ev.z(i), buf);
        for (int j = 0; j < d; ++j) lv(i, j) = buf[j];
    }

    GridFunction out(grid, d);
    for (int j = 0; j < d; ++j) {
        GridFunction psi(grid, 1);
        for (int i = 0; i < n; ++i) psi(i) = ev.lambda(i) * lv(i, j);
        const GridFunction apsi = apply_A(adj, psi);
        for (int i = 0; i < n; ++i) {
            out(i, j) = ev.lambda(i) * lx(i, j) + apsi(i);
        }
    }
    return out;
}

int residual_margin(int n_nodes) {
    return std::max(1, static_cast<int>(std::lround(0.05 * (n_nodes - 1))));
}

double residual_sup_norm(const GridFunction& r) {
    const int m = residual_margin(r.n_nodes());
    double sup = 0.0;
    for (int i = m; i <= r.n_nodes() - 1 - m; ++i) {
        for (int j = 0; j < r.dim(); ++j) sup = std::max(sup, std::abs(r(i, j)));
    }
    return sup;
}

double residual_boundary_sup_norm(const GridFunction& r) {
    const int m = residual_margin(r.n_nodes());
    double sup = 0.0;
    for (int i = 0; i < r.n_nodes(); ++i) {
        if (i >= m && i <= r.n_nodes() - 1 - m) continue;
        for (int j = 0; j < r.dim(); ++j) sup = std::max(sup, std::abs(r(i, j)));
    }
    return sup;
}

std::vector<double> transversality_residual(const HerglotzProblem& prob,
                                            const HerglotzEvaluation& ev) {
    const auto free = prob.free_endpoint_components();
    if (free.empty()) {
        throw std::invalid_argument(
            "transversality is defined only when some endpoint component is free");
    }
    const int n = ev.x.n_nodes();
    const Grid& grid = ev.x.grid();
    const auto& L = prob.lagrangian();
    const OperatorConfig adj = prob.op_config().with_adjoint_pset();

    std::vector<double> lvbuf(prob.dim());
    GridFunction lv(grid, prob.dim());
    for (int i = 0; i < n; ++i) {
        L.dv(grid.node(i), ev.x.row(i), ev.v.row(i), ev.z(i), lvbuf);
        for (int j = 0; j < prob.dim(); ++j) lv(i, j) = lvbuf[j];
    }

    std::vector<double> out;
    out.reserve(free.size());
    for (int j : free) {
        GridFunction psi(grid, 1);
        for (int i = 0; i < n; ++i) psi(i) = ev.lambda(i) * lv(i, j);

        if (adj.classical_mode) {
            out.push_back((adj.pset.p + adj.pset.q) * psi(n - 1));
            continue;
        }

        double value = 0.0;
        if (adj.pset.p != 0.0) {
            // Left part is a plain product integral up to b.
            OperatorConfig left = adj;
            left.pset = ParameterSet(adj.pset.a, adj.pset.b, adj.pset.p, 0.0);
            value += apply_K(left, psi)(n - 1);
        }
        if (adj.pset.q != 0.0) {
            // The right integral at b is an empty range; its one-sided limit
            // behaves like C + D*(b-x)^(1-sigma). Fit the two last interior
            // values and report C.
            OperatorConfig right = adj;
            right.pset = ParameterSet(adj.pset.a, adj.pset.b, 0.0, adj.pset.q);
            const GridFunction kr = apply_K(right, psi);
            const double e = 1.0 - adj.kernel->singularity_exponent();
            const double r1 = kr(n - 3);  // b - 2h
            const double r2 = kr(n - 2);  // b - h
            value += r2 - (r1 - r2) / (std::pow(2.0, e) - 1.0);
        }
        out.push_back(value);
    }
    return out;
}

PartialsReport check_partials(const HerglotzProblem& prob, int n_probes,
                              std::uint64_t seed) {
    if (n_probes < 1) {
        throw std::domain_error("check_partials requires at least one probe");
    }
    const auto& L = prob.lagrangian();
    const int d = prob.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    std::uniform_real_distribution<double> time_dist(prob.op_config().pset.a,
                                                     prob.op_config().pset.b);

    PartialsReport report;
    std::vector<double> x(d), v(d), gx(d), gv(d);
    auto rel_err = [](double fd, double an) {
        return std::abs(fd - an) / (1.0 + std::max(std::abs(fd), std::abs(an)));
    };

    for (int probe = 0; probe < n_probes; ++probe) {
        const double t = time_dist(rng);
        for (int j = 0; j < d; ++j) x[j] = unit(rng);
        for (int j = 0; j < d; ++j) v[j] = unit(rng);
        const double z = prob.z_a() + unit(rng);

        L.dx(t, x, v, z, gx);
        L.dv(t, x, v, z, gv);
        const double gz = L.dz(t, x, v, z);

        for (int j = 0; j < d; ++j) {
            const double step = 1e-6 * (1.0 + std::abs(x[j]));
            const double keep = x[j];
            x[j] = keep + step;
            const double fp = L.value(t, x, v, z);
            x[j] = keep - step;
            const double fm = L.value(t, x, v, z);
            x[j] = keep;
            report.worst_dx = std::max(report.worst_dx, rel_err((fp - fm) / (2 * step), gx[j]));
        }
        for (int j = 0; j < d; ++j) {
            const double step = 1e-6 * (1.0 + std::abs(v[j]));
            const double keep = v[j];
            v[j] = keep + step;
            const double fp = L.value(t, x, v, z);
            v[j] = keep - step;
            const double fm = L.value(t, x, v, z);
            v[j] = keep;
            report.worst_dv = std::max(report.worst_dv, rel_err((fp - fm) / (2 * step), gv[j]));
        }
        {
            const double step = 1e-6 * (1.0 + std::abs(z));
            const double fp = L.value(t, x, v, z + step);
            const double fm = L.value(t, x, v, z - step);
            report.worst_dz = std::max(report.worst_dz, rel_err((fp - fm) / (2 * step), gz));
        }
    }
    return report;
}

}  // namespace herglotz
