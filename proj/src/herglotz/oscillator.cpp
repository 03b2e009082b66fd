#include "herglotz/oscillator.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "herglotz/lagrangians.hpp"

namespace herglotz {

void OscillatorParams::validate() const {
    if (!(m > 0.0)) throw std::domain_error("oscillator mass must be positive");
    if (k < 0.0) throw std::domain_error("oscillator elasticity must be >= 0");
    if (!(b > 0.0)) throw std::domain_error("oscillator horizon b must be positive");
    if (alpha) FractionalOrder check(*alpha);
    if (kernel && !alpha) {
        throw std::domain_error("a kernel is only meaningful with a fractional order");
    }
}

namespace {

OperatorConfig oscillator_config(const OscillatorParams& p) {
    const ParameterSet pset(0.0, p.b, 1.0, 0.0);
    if (!p.alpha) return OperatorConfig::classical(pset);
    const FractionalOrder order(*p.alpha);
    const KernelSpec kernel = p.kernel ? *p.kernel : KernelSpec::caputo(order);
    return OperatorConfig::fractional(order, kernel, pset);
}

}  // namespace

HerglotzProblem oscillator_problem(const OscillatorParams& params) {
    params.validate();
    return HerglotzProblem(1, oscillator_lagrangian(params.m, params.k, params.lambda0),
                           oscillator_config(params), {params.x0}, {params.xb},
                           params.z0, Extremum::Minimize);
}

GridFunction oscillator_el_residual(const OscillatorParams& params,
                                    const HerglotzEvaluation& ev) {
    params.validate();
    const OperatorConfig cfg = oscillator_config(params);
    const OperatorConfig adj = cfg.with_adjoint_pset();
    const Grid& grid = ev.x.grid();
    const int n = grid.n_nodes;

    GridFunction weighted_v(grid, 1);
    for (int i = 0; i < n; ++i) {
        weighted_v(i) = std::exp(-params.lambda0 * grid.node(i)) * ev.v(i, 0);
    }
    const GridFunction a_term = apply_A(adj, weighted_v);

    GridFunction out(grid, 1);
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(-params.lambda0 * grid.node(i));
        out(i) = params.m * a_term(i) - params.k * w * ev.x(i, 0);
    }
    return out;
}

GridFunction classical_damped_residual(const OscillatorParams& params,
                                       const GridFunction& x) {
    params.validate();
    const Grid& grid = x.grid();
    const int n = grid.n_nodes;
    const GridFunction dx = derivative(x);
    GridFunction weighted(grid, 1);
    for (int i = 0; i < n; ++i) {
        weighted(i) = std::exp(-params.lambda0 * grid.node(i)) * dx(i, 0);
    }
    const GridFunction dw = derivative(weighted);
    GridFunction out(grid, 1);
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(-params.lambda0 * grid.node(i));
        out(i) = params.m * dw(i) + params.k * w * x(i, 0);
    }
    return out;
}

std::function<double(double)> classical_reference(const OscillatorParams& params) {
    params.validate();
    // Characteristic equation of m x'' - m lambda0 x' + k x = 0.
    const double disc = params.lambda0 * params.lambda0 - 4.0 * params.k / params.m;

    std::function<double(double)> basis1, basis2, dbasis1, dbasis2;
    if (std::abs(disc) < 1e-12 * (params.lambda0 * params.lambda0 +
                                  4.0 * params.k / params.m + 1e-30)) {
        const double r = 0.5 * params.lambda0;
        basis1 = [r](double t) { return std::exp(r * t); };
        basis2 = [r](double t) { return t * std::exp(r * t); };
        dbasis1 = [r](double t) { return r * std::exp(r * t); };
        dbasis2 = [r](double t) { return (1.0 + r * t) * std::exp(r * t); };
    } else if (disc > 0.0) {
        const double r1 = 0.5 * (params.lambda0 + std::sqrt(disc));
        const double r2 = 0.5 * (params.lambda0 - std::sqrt(disc));
        basis1 = [r1](double t) { return std::exp(r1 * t); };
        basis2 = [r2](double t) { return std::exp(r2 * t); };
        dbasis1 = [r1](double t) { return r1 * std::exp(r1 * t); };
        dbasis2 = [r2](double t) { return r2 * std::exp(r2 * t); };
    } else {
        const double sig = 0.5 * params.lambda0;
        const double om = 0.5 * std::sqrt(-disc);
        basis1 = [sig, om](double t) { return std::exp(sig * t) * std::cos(om * t); };
        basis2 = [sig, om](double t) { return std::exp(sig * t) * std::sin(om * t); };
        dbasis1 = [sig, om](double t) {
            return std::exp(sig * t) * (sig * std::cos(om * t) - om * std::sin(om * t));
        };
        dbasis2 = [sig, om](double t) {
            return std::exp(sig * t) * (sig * std::sin(om * t) + om * std::cos(om * t));
        };
    }

    // Rows: x(0) = x0 and either x(b) = xb or x'(b) = 0 (free endpoint).
    const double a11 = basis1(0.0), a12 = basis2(0.0);
    double a21, a22, rhs2;
    if (params.xb) {
        a21 = basis1(params.b);
        a22 = basis2(params.b);
        rhs2 = *params.xb;
    } else {
        a21 = dbasis1(params.b);
        a22 = dbasis2(params.b);
        rhs2 = 0.0;
    }
    const double det = a11 * a22 - a12 * a21;
    const double scale = std::max({std::abs(a11 * a22), std::abs(a12 * a21), 1.0});
    if (std::abs(det) < 1e-12 * scale) {
        throw std::domain_error(
            "boundary data leads to a degenerate classical reference system");
    }
    const double c1 = (params.x0 * a22 - rhs2 * a12) / det;
    const double c2 = (rhs2 * a11 - params.x0 * a21) / det;

    return [c1, c2, basis1, basis2](double t) {
        return c1 * basis1(t) + c2 * basis2(t);
    };
}

SweepTable alpha_sweep(const OscillatorParams& params,
                       const std::vector<double>& alphas, int n_nodes,
                       const SolveOptions& opts, int jobs) {
    params.validate();
    SweepTable table;
    if (alphas.empty()) return table;

    table.rows.resize(alphas.size());
    std::vector<std::optional<GridFunction>> solved(alphas.size());

    auto run_one = [&](std::size_t idx) {
        SweepRow& row = table.rows[idx];
        row.alpha = alphas[idx];
        try {
            OscillatorParams p = params;
            p.alpha = alphas[idx];
            const HerglotzProblem prob = oscillator_problem(p);
            const Grid grid(0.0, p.b, n_nodes);
            const SolveResult r = solve_direct(prob, grid, opts);
            row.solved = true;
            row.z_b = r.z_b();
            row.converged = r.converged;
            row.gradient_norm = r.final_gradient_norm;
            row.el_supnorm = r.el_residual_supnorm[0];
            solved[idx] = r.evaluation.x;
        } catch (const std::exception& e) {
            row.solved = false;
            row.error = e.what();
        }
    };

    if (jobs <= 1 || alphas.size() == 1) {
        for (std::size_t i = 0; i < alphas.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        const int workers = static_cast<int>(
            std::min<std::size_t>(static_cast<std::size_t>(jobs), alphas.size()));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < alphas.size();
                     i = next.fetch_add(1)) {
                    run_one(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // Classical reference curve on the same grid.
    const Grid grid(0.0, params.b, n_nodes);
    const auto ref = classical_reference(params);
    table.classical_curve = GridFunction::sample(grid, ref);

    const GridFunction* prev = nullptr;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!solved[i]) {
            table.trajectories.emplace_back(grid, 1);
            prev = nullptr;
            continue;
        }
        table.trajectories.push_back(*solved[i]);
        SweepRow& row = table.rows[i];
        row.diff_to_classical = linf_distance(*solved[i], *table.classical_curve);
        if (prev) row.diff_to_previous = linf_distance(*solved[i], *prev);
        prev = &table.trajectories.back();
    }
    return table;
}

}  // namespace herglotz
