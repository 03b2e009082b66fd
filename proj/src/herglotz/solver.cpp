#include "herglotz/solver.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

namespace herglotz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Kernel moments seen from a cell midpoint: whalf covers the own half-cell
/// [0, h/2], wmid(m) the full cell m steps away, [(m-1/2)h, (m+1/2)h].
struct MidpointWeights {
    double whalf;
    std::vector<double> wmid;

    static std::shared_ptr<const MidpointWeights> get(const KernelSpec& kernel,
                                                      double h, int n_cells);
};

std::mutex g_mid_mutex;
std::map<std::tuple<std::uint64_t, double, int>,
         std::shared_ptr<const MidpointWeights>>
    g_mid_cache;

std::shared_ptr<const MidpointWeights> MidpointWeights::get(const KernelSpec& kernel,
                                                            double h, int n_cells) {
    const auto key = std::make_tuple(kernel.cache_token(), h, n_cells);
    {
        std::lock_guard<std::mutex> lock(g_mid_mutex);
        auto it = g_mid_cache.find(key);
        if (it != g_mid_cache.end()) return it->second;
    }
    auto w = std::make_shared<MidpointWeights>();
    w->whalf = kernel.moment0(0.0, 0.5 * h);
    w->wmid.resize(n_cells);
    for (int m = 1; m <= n_cells; ++m) {
        w->wmid[m - 1] = kernel.moment0((m - 0.5) * h, (m + 0.5) * h);
    }
    std::lock_guard<std::mutex> lock(g_mid_mutex);
    auto [it, inserted] = g_mid_cache.emplace(key, std::move(w));
    (void)inserted;
    return it->second;
}

/// Staggered (midpoint) transcription of the problem.
///
/// The node-collocated evaluation pairs a central-difference velocity with
/// nodal quadrature; as a *minimization objective* that pairing admits
/// node-to-node oscillation modes the velocity term cannot see, and its
/// boundary stencils break discrete integration by parts. The solver
/// therefore transcribes on cells: slopes u_c = (x_{c+1}-x_c)/h, states at
/// cell midpoints, the memory integral product-integrated against the
/// piecewise-constant slope (the L1-scheme structure), and z stepped by the
/// explicit midpoint rule. Every reported diagnostic still comes from the
/// node-based operators.
class DirectEngine {
public:
    DirectEngine(const HerglotzProblem& prob, const Grid& grid)
        : prob_(prob),
          grid_(grid),
          n_(grid.n_nodes),
          cells_(grid.n_nodes - 1),
          dim_(prob.dim()),
          sign_(prob.direction() == Extremum::Minimize ? 1.0 : -1.0),
          x_(grid, prob.dim()),
          vbar_(static_cast<std::size_t>(cells_) * prob.dim(), 0.0),
          columns_(grid.n_nodes) {
        if (!prob.op_config().classical_mode) {
            weights_ = MidpointWeights::get(*prob.op_config().kernel, grid.h(), cells_);
        }
        for (int i = 1; i < n_ - 1; ++i) {
            for (int j = 0; j < dim_; ++j) free_vars_.push_back({i, j});
        }
        for (int j = 0; j < dim_; ++j) {
            if (!prob.x_b()[j]) free_vars_.push_back({n_ - 1, j});
        }
    }

    int n_free() const { return static_cast<int>(free_vars_.size()); }
    const GridFunction& x() const { return x_; }
    int evaluations() const { return evals_; }

    std::vector<double> pack() const {
        std::vector<double> u(free_vars_.size());
        for (std::size_t l = 0; l < free_vars_.size(); ++l) {
            u[l] = x_(free_vars_[l].node, free_vars_[l].comp);
        }
        return u;
    }

    void move_to(std::span<const double> u) {
        stamp_fixed();
        for (std::size_t l = 0; l < free_vars_.size(); ++l) {
            x_(free_vars_[l].node, free_vars_[l].comp) = u[l];
        }
        refresh();
    }

    void set_initial(const GridFunction& x0) {
        x_ = x0;
        stamp_fixed();
        refresh();
    }

    double base_objective() const { return base_f_; }

    void gradient(const SolveOptions& opts, std::span<double> g) {
        for (std::size_t l = 0; l < free_vars_.size(); ++l) {
            const auto [node, comp] = free_vars_[l];
            const double delta = opts.fd_step * (1.0 + std::abs(x_(node, comp)));
            const double fp = probe(node, comp, delta);
            const double fm = probe(node, comp, -delta);
            g[l] = (fp - fm) / (2.0 * delta);
        }
    }

    void prepare_direction(std::span<const double> d) {
        dir_dx_.assign(static_cast<std::size_t>(n_) * dim_, 0.0);
        for (std::size_t l = 0; l < free_vars_.size(); ++l) {
            dir_dx_[static_cast<std::size_t>(free_vars_[l].node) * dim_ +
                    free_vars_[l].comp] = d[l];
        }
        dir_dv_.assign(static_cast<std::size_t>(cells_) * dim_, 0.0);
        velocity_from_nodal(dir_dx_, dir_dv_);
    }

    double try_step(double alpha) {
        trial_x_.resize(static_cast<std::size_t>(n_) * dim_);
        trial_v_.resize(static_cast<std::size_t>(cells_) * dim_);
        const auto x0 = x_.flat();
        for (std::size_t i = 0; i < trial_x_.size(); ++i) {
            trial_x_[i] = x0[i] + alpha * dir_dx_[i];
        }
        for (std::size_t i = 0; i < trial_v_.size(); ++i) {
            trial_v_[i] = vbar_[i] + alpha * dir_dv_[i];
        }
        return midpoint_objective(trial_x_, trial_v_);
    }

private:
    struct Var {
        int node;
        int comp;
    };

    void stamp_fixed() {
        for (int j = 0; j < dim_; ++j) {
            x_(0, j) = prob_.x_a()[j];
            if (prob_.x_b()[j]) x_(n_ - 1, j) = *prob_.x_b()[j];
        }
    }

    void refresh() {
        velocity_from_nodal(x_.flat(), vbar_);
        base_f_ = midpoint_objective(x_.flat(), vbar_);
    }

    /// vbar(c, j) = generalized velocity at the midpoint of cell c from the
    /// piecewise-constant slopes of the nodal values.
    void velocity_from_nodal(std::span<const double> nodal,
                             std::span<double> vbar) const {
        const double h = grid_.h();
        const auto& ps = prob_.op_config().pset;
        slopes_.resize(static_cast<std::size_t>(cells_) * dim_);
        for (int c = 0; c < cells_; ++c) {
            for (int j = 0; j < dim_; ++j) {
                slopes_[static_cast<std::size_t>(c) * dim_ + j] =
                    (nodal[static_cast<std::size_t>(c + 1) * dim_ + j] -
                     nodal[static_cast<std::size_t>(c) * dim_ + j]) /
                    h;
            }
        }
        if (prob_.op_config().classical_mode) {
            const double w = ps.p + ps.q;
            for (std::size_t i = 0; i < vbar.size(); ++i) vbar[i] = w * slopes_[i];
            return;
        }
        const auto& w = *weights_;
        auto slope = [&](int c, int j) {
            return slopes_[static_cast<std::size_t>(c) * dim_ + j];
        };
        for (int c = 0; c < cells_; ++c) {
            for (int j = 0; j < dim_; ++j) {
                double acc = 0.0;
                if (ps.p != 0.0) {
                    double sum = w.whalf * slope(c, j);
                    for (int m = 1; m <= c; ++m) {
                        sum += w.wmid[m - 1] * slope(c - m, j);
                    }
                    acc += ps.p * sum;
                }
                if (ps.q != 0.0) {
                    double sum = w.whalf * slope(c, j);
                    for (int m = 1; m <= cells_ - 1 - c; ++m) {
                        sum += w.wmid[m - 1] * slope(c + m, j);
                    }
                    acc += ps.q * sum;
                }
                vbar[static_cast<std::size_t>(c) * dim_ + j] = acc;
            }
        }
    }

    /// Explicit midpoint step of z across cells, states averaged to
    /// midpoints. Returns the signed objective.
    double midpoint_objective(std::span<const double> nodal,
                              std::span<const double> vbar) {
        ++evals_;
        const double h = grid_.h();
        const auto& L = prob_.lagrangian();
        xmid_.resize(dim_);
        double z = prob_.z_a();
        for (int c = 0; c < cells_; ++c) {
            const double tmid = grid_.a + (c + 0.5) * h;
            for (int j = 0; j < dim_; ++j) {
                xmid_[j] = 0.5 * (nodal[static_cast<std::size_t>(c) * dim_ + j] +
                                  nodal[static_cast<std::size_t>(c + 1) * dim_ + j]);
            }
            const auto vrow = vbar.subspan(static_cast<std::size_t>(c) * dim_,
                                           static_cast<std::size_t>(dim_));
            const double l0 = L.value(tmid, xmid_, vrow, z);
            if (!std::isfinite(l0)) return kInf;
            const double l1 = L.value(tmid, xmid_, vrow, z + 0.5 * h * l0);
            z += h * l1;
            if (!std::isfinite(z)) return kInf;
        }
        return sign_ * z;
    }

    /// Velocity response to a unit displacement of one node (component-
    /// independent): only the two adjacent cell slopes change.
    const std::vector<double>& column(int node) {
        auto& col = columns_[node];
        if (col.empty()) {
            std::vector<double> nodal(static_cast<std::size_t>(n_), 0.0);
            nodal[node] = 1.0;
            col.resize(static_cast<std::size_t>(cells_), 0.0);
            // dim-1 view of velocity_from_nodal
            const double h = grid_.h();
            const auto& ps = prob_.op_config().pset;
            std::vector<double> slopes(cells_, 0.0);
            if (node > 0) slopes[node - 1] = 1.0 / h;
            if (node < cells_) slopes[node] = -1.0 / h;
            if (prob_.op_config().classical_mode) {
                const double w = ps.p + ps.q;
                for (int c = 0; c < cells_; ++c) col[c] = w * slopes[c];
            } else {
                const auto& w = *weights_;
                for (int c = 0; c < cells_; ++c) {
                    double acc = 0.0;
                    if (ps.p != 0.0) {
                        double sum = w.whalf * slopes[c];
                        for (int m = 1; m <= c; ++m) sum += w.wmid[m - 1] * slopes[c - m];
                        acc += ps.p * sum;
                    }
                    if (ps.q != 0.0) {
                        double sum = w.whalf * slopes[c];
                        for (int m = 1; m <= cells_ - 1 - c; ++m) {
                            sum += w.wmid[m - 1] * slopes[c + m];
                        }
                        acc += ps.q * sum;
                    }
                    col[c] = acc;
                }
            }
        }
        return col;
    }

    double probe(int node, int comp, double delta) {
        ++evals_;
        const auto& col = column(node);
        const double h = grid_.h();
        const auto& L = prob_.lagrangian();
        xmid_.resize(dim_);
        vrow_.resize(dim_);
        double z = prob_.z_a();
        for (int c = 0; c < cells_; ++c) {
            const double tmid = grid_.a + (c + 0.5) * h;
            for (int j = 0; j < dim_; ++j) {
                xmid_[j] = 0.5 * (x_(c, j) + x_(c + 1, j));
                vrow_[j] = vbar_[static_cast<std::size_t>(c) * dim_ + j];
            }
            vrow_[comp] += delta * col[c];
            if (c == node - 1 || c == node) xmid_[comp] += 0.5 * delta;
            const double l0 = L.value(tmid, xmid_, vrow_, z);
            if (!std::isfinite(l0)) return kInf;
            const double l1 = L.value(tmid, xmid_, vrow_, z + 0.5 * h * l0);
            z += h * l1;
            if (!std::isfinite(z)) return kInf;
        }
        return sign_ * z;
    }

    const HerglotzProblem& prob_;
    Grid grid_;
    int n_;
    int cells_;
    int dim_;
    double sign_;
    GridFunction x_;
    std::vector<double> vbar_;
    double base_f_ = kInf;
    std::vector<Var> free_vars_;
    std::vector<std::vector<double>> columns_;
    std::shared_ptr<const MidpointWeights> weights_;
    std::vector<double> dir_dx_, dir_dv_;
    std::vector<double> trial_x_, trial_v_;
    mutable std::vector<double> slopes_;
    std::vector<double> xmid_, vrow_;
    int evals_ = 0;
};

GridFunction initial_guess(const HerglotzProblem& prob, const Grid& grid,
                           const SolveOptions& opts) {
    GridFunction x(grid, prob.dim());
    switch (opts.initial_guess) {
        case SolveOptions::Guess::LinearInterp:
            for (int j = 0; j < prob.dim(); ++j) {
                const double xa = prob.x_a()[j];
                if (prob.x_b()[j]) {
                    const double xb = *prob.x_b()[j];
                    for (int i = 0; i < grid.n_nodes; ++i) {
                        const double w = static_cast<double>(i) / (grid.n_nodes - 1);
                        x(i, j) = xa + w * (xb - xa);
                    }
                } else {
                    for (int i = 0; i < grid.n_nodes; ++i) x(i, j) = xa;
                }
            }
            break;
        case SolveOptions::Guess::ConstantLeft:
            for (int j = 0; j < prob.dim(); ++j) {
                for (int i = 0; i < grid.n_nodes; ++i) x(i, j) = prob.x_a()[j];
            }
            break;
        case SolveOptions::Guess::Provided: {
            if (!opts.provided_guess) {
                throw std::invalid_argument("initial_guess=Provided without a trajectory");
            }
            const GridFunction& given = *opts.provided_guess;
            if (given.dim() != prob.dim()) {
                throw std::invalid_argument("provided guess has the wrong dimension");
            }
            for (int i = 0; i < grid.n_nodes; ++i) {
                const auto vals = interpolate(given, grid.node(i));
                for (int j = 0; j < prob.dim(); ++j) x(i, j) = vals[j];
            }
            break;
        }
    }
    // Fixed boundary values are stamped bit-exactly from the problem data.
    for (int j = 0; j < prob.dim(); ++j) {
        x(0, j) = prob.x_a()[j];
        if (prob.x_b()[j]) x(grid.n_nodes - 1, j) = *prob.x_b()[j];
    }
    return x;
}

}  // namespace

void SolveOptions::validate() const {
    if (!(gradient_tolerance > 0.0) || !(step_tolerance > 0.0)) {
        throw std::domain_error("solver tolerances must be positive");
    }
    if (!(fd_step > 1e-10 && fd_step < 1e-2)) {
        throw std::domain_error("fd_step must lie in (1e-10, 1e-2)");
    }
    if (max_iterations < 1 || memory < 1 || max_line_search < 1) {
        throw std::domain_error("solver iteration limits must be positive");
    }
}

SolveResult solve_direct(const HerglotzProblem& prob, const Grid& grid,
                         const SolveOptions& opts) {
    opts.validate();
    if (grid.n_nodes < 5) {
        throw std::domain_error("direct solve requires at least 5 nodes");
    }
    {
        const auto& ps = prob.op_config().pset;
        const double span = ps.b - ps.a;
        if (std::abs(grid.a - ps.a) > 1e-12 * span ||
            std::abs(grid.b - ps.b) > 1e-12 * span) {
            throw std::invalid_argument("grid interval does not match the problem");
        }
    }

    DirectEngine engine(prob, grid);
    engine.set_initial(initial_guess(prob, grid, opts));
    if (!std::isfinite(engine.base_objective())) {
        throw SetupError("objective is not finite at the initial guess");
    }

    const int n = engine.n_free();
    std::vector<double> u = engine.pack();
    std::vector<double> g(n), g_new(n), d(n);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> history;

    engine.gradient(opts, g);
    double gnorm = sup(g);
    double f = engine.base_objective();

    bool converged = gnorm <= opts.gradient_tolerance;
    bool ls_failed = false;
    double step_norm = 0.0;
    int iter = 0;

    while (!converged && iter < opts.max_iterations) {
        ++iter;

        // Two-loop recursion for d = -H*g.
        d.assign(g.begin(), g.end());
        std::vector<double> alpha_hist(history.size());
        for (std::size_t idx = history.size(); idx-- > 0;) {
            const auto& p = history[idx];
            double sd = 0.0;
            for (int i = 0; i < n; ++i) sd += p.s[i] * d[i];
            alpha_hist[idx] = p.rho * sd;
            for (int i = 0; i < n; ++i) d[i] -= alpha_hist[idx] * p.y[i];
        }
        if (!history.empty()) {
            const auto& last = history.back();
            double sy = 0.0, yy = 0.0;
            for (int i = 0; i < n; ++i) {
                sy += last.s[i] * last.y[i];
                yy += last.y[i] * last.y[i];
            }
            const double gamma = sy / yy;
            for (int i = 0; i < n; ++i) d[i] *= gamma;
        }
        for (std::size_t idx = 0; idx < history.size(); ++idx) {
            const auto& p = history[idx];
            double yd = 0.0;
            for (int i = 0; i < n; ++i) yd += p.y[i] * d[i];
            const double beta = p.rho * yd;
            for (int i = 0; i < n; ++i) d[i] += (alpha_hist[idx] - beta) * p.s[i];
        }
        for (int i = 0; i < n; ++i) d[i] = -d[i];

        double slope = 0.0;
        for (int i = 0; i < n; ++i) slope += g[i] * d[i];
        if (!(slope < 0.0)) {
            history.clear();
            for (int i = 0; i < n; ++i) d[i] = -g[i];
            slope = 0.0;
            for (int i = 0; i < n; ++i) slope += g[i] * d[i];
        }

        engine.prepare_direction(d);
        double alpha = history.empty() ? 1.0 / std::max(1.0, sup(d)) : 1.0;
        bool accepted = false;
        for (int trial = 0; trial < opts.max_line_search; ++trial) {
            const double f_trial = engine.try_step(alpha);
            if (f_trial <= f + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!history.empty()) {
                // Retry as a steepest-descent step before giving up.
                history.clear();
                --iter;
                continue;
            }
            ls_failed = true;
            break;
        }

        std::vector<double> s(n), y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = alpha * d[i];
            u[i] += s[i];
        }
        engine.move_to(u);
        f = engine.base_objective();
        engine.gradient(opts, g_new);
        for (int i = 0; i < n; ++i) y[i] = g_new[i] - g[i];

        double sy = 0.0, ss = 0.0, yy = 0.0;
        for (int i = 0; i < n; ++i) {
            sy += s[i] * y[i];
            ss += s[i] * s[i];
            yy += y[i] * y[i];
        }
        if (sy > 1e-12 * std::sqrt(ss) * std::sqrt(yy)) {
            history.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
        }

        g = g_new;
        gnorm = sup(g);
        step_norm = alpha * sup(d);
        if (gnorm <= opts.gradient_tolerance) {
            converged = true;
            break;
        }
        if (step_norm <= opts.step_tolerance * (1.0 + sup(u))) {
            break;
        }
    }

    SolveResult result(evaluate_z(prob, engine.x()));
    result.converged = converged;
    result.iterations = iter;
    result.final_gradient_norm = gnorm;
    result.final_step_norm = step_norm;
    result.objective_evaluations = engine.evaluations();
    result.line_search_failed = ls_failed;

    const GridFunction el = el_residual(prob, result.evaluation);
    result.el_residual_supnorm.assign(prob.dim(), 0.0);
    const int margin = residual_margin(el.n_nodes());
    for (int i = margin; i <= el.n_nodes() - 1 - margin; ++i) {
        for (int j = 0; j < prob.dim(); ++j) {
            result.el_residual_supnorm[j] =
                std::max(result.el_residual_supnorm[j], std::abs(el(i, j)));
        }
    }
    if (prob.free_endpoint_count() > 0) {
        result.transversality_residuals = transversality_residual(prob, result.evaluation);
    }
    return result;
}

double stationarity_probe(const HerglotzProblem& prob, const GridFunction& x,
                          double delta) {
    if (!(delta > 0.0)) {
        throw std::domain_error("stationarity probe step must be positive");
    }
    DirectEngine engine(prob, x.grid());
    engine.set_initial(x);
    const double f0 = engine.base_objective();

    const int n = engine.n_free();
    const std::vector<double> u = engine.pack();
    std::vector<double> trial = u;
    double worst = 0.0;
    for (int l = 0; l < n; ++l) {
        const double step = delta * (1.0 + std::abs(u[l]));
        for (double sgn : {1.0, -1.0}) {
            trial[l] = u[l] + sgn * step;
            engine.move_to(trial);
            worst = std::max(worst, f0 - engine.base_objective());
        }
        trial[l] = u[l];
    }
    return worst;
}

double ConvergenceReport::observed_order() const {
    if (levels.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t k = levels.size();
    const double d1 = std::abs(levels[k - 3].z_b - levels[k - 2].z_b);
    const double d2 = std::abs(levels[k - 2].z_b - levels[k - 1].z_b);
    if (d2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(d1 / d2);
}

ConvergenceReport refine_and_verify(const HerglotzProblem& prob, const Grid& grid,
                                    const SolveOptions& opts, int levels) {
    if (levels < 1) {
        throw std::domain_error("refinement study needs at least one level");
    }
    ConvergenceReport report;
    SolveOptions level_opts = opts;
    std::optional<GridFunction> previous;
    int n = grid.n_nodes;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const Grid g(grid.a, grid.b, n);
        if (previous) {
            level_opts.initial_guess = SolveOptions::Guess::Provided;
            level_opts.provided_guess = previous;
        }
        const SolveResult r = solve_direct(prob, g, level_opts);

        ConvergenceLevel entry;
        entry.n_nodes = n;
        entry.z_b = r.z_b();
        entry.converged = r.converged;
        entry.gradient_norm = r.final_gradient_norm;
        for (double s : r.el_residual_supnorm) {
            entry.el_supnorm = std::max(entry.el_supnorm, s);
        }
        if (previous) {
            // Nested grids: coarse node i coincides with fine node 2i.
            double diff = 0.0;
            for (int i = 0; i < previous->n_nodes(); ++i) {
                for (int j = 0; j < prob.dim(); ++j) {
                    diff = std::max(diff,
                                    std::abs((*previous)(i, j) - r.evaluation.x(2 * i, j)));
                }
            }
            entry.diff_to_previous = diff;
        }
        if (!report.levels.empty() &&
            entry.el_supnorm > report.levels.back().el_supnorm) {
            report.residual_nonincreasing = false;
        }
        report.levels.push_back(entry);
        previous = r.evaluation.x;
        n = 2 * n - 1;
    }
    return report;
}

}  // namespace herglotz
