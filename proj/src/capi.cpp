#include "herglotz.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "herglotz/config.hpp"
#include "herglotz/lagrangians.hpp"
#include "herglotz/noether.hpp"
#include "herglotz/oscillator.hpp"
#include "herglotz/solver.hpp"

using nlohmann::json;

struct hgz_kernel {
    herglotz::KernelSpec spec;
};
struct hgz_gridfn {
    herglotz::GridFunction f;
};
struct hgz_problem {
    herglotz::HerglotzProblem prob;
};
struct hgz_evaluation {
    herglotz::HerglotzEvaluation ev;
};
struct hgz_solve_result {
    herglotz::SolveResult r;
};
struct hgz_generator {
    herglotz::TransformationFamily fam;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
hgz_status guard(Fn&& fn) {
    try {
        fn();
        return HGZ_OK;
    } catch (const herglotz::ConfigError& e) {
        set_error(e.what());
        return HGZ_ERR_PARSE;
    } catch (const herglotz::EvaluationError& e) {
        set_error(e.what());
        return HGZ_ERR_EVALUATION;
    } catch (const herglotz::SetupError& e) {
        set_error(e.what());
        return HGZ_ERR_SOLVE;
    } catch (const std::domain_error& e) {
        set_error(e.what());
        return HGZ_ERR_DOMAIN;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return HGZ_ERR_INVALID_ARGUMENT;
    } catch (const std::runtime_error& e) {
        set_error(e.what());
        return HGZ_ERR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return HGZ_ERR_INTERNAL;
    }
}

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

herglotz::ParameterSet to_pset(const hgz_pset& p) {
    return herglotz::ParameterSet(p.a, p.b, p.p, p.q);
}

herglotz::OperatorConfig to_config(const hgz_opconfig* cfg) {
    require(cfg != nullptr, "operator config is null");
    const herglotz::ParameterSet ps = to_pset(cfg->pset);
    if (cfg->classical) {
        return herglotz::OperatorConfig::classical(ps);
    }
    require(cfg->kernel != nullptr, "fractional operator config needs a kernel");
    return herglotz::OperatorConfig::fractional(herglotz::FractionalOrder(cfg->alpha),
                                                cfg->kernel->spec, ps);
}

herglotz::SolveOptions to_options(const hgz_solve_options* opts) {
    herglotz::SolveOptions o;
    if (!opts) return o;
    o.max_iterations = opts->max_iterations;
    o.gradient_tolerance = opts->gradient_tolerance;
    o.step_tolerance = opts->step_tolerance;
    o.fd_step = opts->fd_step;
    switch (opts->initial_guess) {
        case 0:
            o.initial_guess = herglotz::SolveOptions::Guess::LinearInterp;
            break;
        case 1:
            o.initial_guess = herglotz::SolveOptions::Guess::ConstantLeft;
            break;
        case 2:
            o.initial_guess = herglotz::SolveOptions::Guess::Provided;
            require(opts->provided_guess != nullptr,
                    "initial_guess=provided needs provided_guess");
            o.provided_guess = opts->provided_guess->f;
            break;
        default:
            throw std::invalid_argument("initial_guess must be 0, 1 or 2");
    }
    o.memory = opts->memory;
    o.max_line_search = opts->max_line_search;
    return o;
}

herglotz::OscillatorParams to_oscillator(const hgz_oscillator_params* p) {
    require(p != nullptr, "oscillator params are null");
    herglotz::OscillatorParams out;
    out.m = p->m;
    out.k = p->k;
    out.lambda0 = p->lambda0;
    if (!p->classical) out.alpha = p->alpha;
    if (p->kernel) {
        require(!p->classical, "a kernel conflicts with classical mode");
        out.kernel = p->kernel->spec;
    }
    out.b = p->b;
    out.x0 = p->x0;
    if (p->xb_fixed) out.xb = p->xb;
    out.z0 = p->z0;
    return out;
}

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

json sweep_row_json(const herglotz::SweepRow& row) {
    json j;
    j["alpha"] = row.alpha;
    j["solved"] = row.solved;
    if (!row.error.empty()) j["error"] = row.error;
    if (row.solved) {
        j["z_b"] = row.z_b;
        j["converged"] = row.converged;
        j["gradient_norm"] = row.gradient_norm;
        j["el_residual_supnorm"] = row.el_supnorm;
        j["diff_to_previous"] = row.diff_to_previous;
        j["diff_to_classical"] = row.diff_to_classical;
    }
    return j;
}

}  // namespace

const char* hgz_version(void) { return "0.1.0"; }

const char* hgz_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------------ kernels */

hgz_status hgz_kernel_power_law(double beta, hgz_kernel** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        *out = new hgz_kernel{herglotz::KernelSpec::power_law(beta)};
    });
}

hgz_status hgz_kernel_exponential(double rate, double scale, hgz_kernel** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        *out = new hgz_kernel{herglotz::KernelSpec::exponential(rate, scale)};
    });
}

hgz_status hgz_kernel_tabulated(const double* s, const double* k, size_t n,
                                hgz_kernel** out) {
    return guard([&] {
        require(out != nullptr && s != nullptr && k != nullptr,
                "tabulated kernel needs sample arrays");
        *out = new hgz_kernel{herglotz::KernelSpec::tabulated(
            std::vector<double>(s, s + n), std::vector<double>(k, k + n))};
    });
}

hgz_status hgz_kernel_caputo(double alpha, hgz_kernel** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        *out = new hgz_kernel{
            herglotz::KernelSpec::caputo(herglotz::FractionalOrder(alpha))};
    });
}

hgz_status hgz_kernel_from_json(const char* json_text, hgz_kernel** out) {
    return guard([&] {
        require(out != nullptr && json_text != nullptr, "null argument");
        *out = new hgz_kernel{herglotz::parse_kernel_json(json_text)};
    });
}

hgz_status hgz_kernel_eval(const hgz_kernel* kernel, double s, double* out) {
    return guard([&] {
        require(kernel != nullptr && out != nullptr, "null argument");
        *out = kernel->spec.eval(s);
    });
}

double hgz_kernel_singularity_exponent(const hgz_kernel* kernel) {
    if (!kernel) return std::nan("");
    return kernel->spec.singularity_exponent();
}

hgz_status hgz_kernel_check_monotonicity(const hgz_kernel* kernel, double s_min,
                                         double s_max, int n_samples,
                                         int max_order,
                                         double* worst_violations) {
    return guard([&] {
        require(kernel != nullptr && worst_violations != nullptr, "null argument");
        const auto report = herglotz::check_complete_monotonicity(
            kernel->spec, s_min, s_max, n_samples, max_order);
        for (const auto& entry : report.entries) {
            worst_violations[entry.order] = entry.worst_violation;
        }
    });
}

void hgz_kernel_free(hgz_kernel* kernel) { delete kernel; }

hgz_pset hgz_pset_adjoint(hgz_pset pset) {
    hgz_pset out = pset;
    out.p = pset.q;
    out.q = pset.p;
    return out;
}

/* -------------------------------------------------------------- grid functions */

hgz_status hgz_gridfn_create(double a, double b, int n_nodes, int dim,
                             const double* values, hgz_gridfn** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        herglotz::Grid grid(a, b, n_nodes);
        if (values) {
            std::vector<double> v(values,
                                  values + static_cast<size_t>(n_nodes) * dim);
            *out = new hgz_gridfn{herglotz::GridFunction(grid, dim, std::move(v))};
        } else {
            *out = new hgz_gridfn{herglotz::GridFunction(grid, dim)};
        }
    });
}

hgz_status hgz_gridfn_read_csv(const char* path, hgz_gridfn** out) {
    return guard([&] {
        require(out != nullptr && path != nullptr, "null argument");
        *out = new hgz_gridfn{herglotz::read_csv(path)};
    });
}

hgz_status hgz_gridfn_write_csv(const hgz_gridfn* f, const char* path) {
    return guard([&] {
        require(f != nullptr && path != nullptr, "null argument");
        herglotz::write_csv(f->f, path);
    });
}

int hgz_gridfn_nodes(const hgz_gridfn* f) { return f ? f->f.n_nodes() : 0; }
int hgz_gridfn_dim(const hgz_gridfn* f) { return f ? f->f.dim() : 0; }
double hgz_gridfn_a(const hgz_gridfn* f) { return f ? f->f.grid().a : std::nan(""); }
double hgz_gridfn_b(const hgz_gridfn* f) { return f ? f->f.grid().b : std::nan(""); }

hgz_status hgz_gridfn_values(const hgz_gridfn* f, double* out) {
    return guard([&] {
        require(f != nullptr && out != nullptr, "null argument");
        const auto flat = f->f.flat();
        std::memcpy(out, flat.data(), flat.size() * sizeof(double));
    });
}

hgz_status hgz_gridfn_eval(const hgz_gridfn* f, double t, double* out) {
    return guard([&] {
        require(f != nullptr && out != nullptr, "null argument");
        const auto vals = herglotz::interpolate(f->f, t);
        std::memcpy(out, vals.data(), vals.size() * sizeof(double));
    });
}

void hgz_gridfn_free(hgz_gridfn* f) { delete f; }

double hgz_residual_sup(const hgz_gridfn* r) {
    if (!r) return std::nan("");
    return herglotz::residual_sup_norm(r->f);
}

double hgz_residual_boundary_sup(const hgz_gridfn* r) {
    if (!r) return std::nan("");
    return herglotz::residual_boundary_sup_norm(r->f);
}

/* ----------------------------------------------------------------- operators */

hgz_status hgz_apply(char op, const hgz_opconfig* cfg, const hgz_gridfn* f,
                     hgz_gridfn** out) {
    return guard([&] {
        require(f != nullptr && out != nullptr, "null argument");
        const herglotz::OperatorConfig config = to_config(cfg);
        switch (op) {
            case 'K':
                *out = new hgz_gridfn{herglotz::apply_K(config, f->f)};
                break;
            case 'A':
                *out = new hgz_gridfn{herglotz::apply_A(config, f->f)};
                break;
            case 'B':
                *out = new hgz_gridfn{herglotz::apply_B(config, f->f)};
                break;
            default:
                throw std::invalid_argument("op must be 'K', 'A' or 'B'");
        }
    });
}

hgz_status hgz_ibp_check(const hgz_opconfig* cfg, const hgz_gridfn* f,
                         const hgz_gridfn* g, double* lhs, double* rhs,
                         double* boundary, double* residual) {
    return guard([&] {
        require(f != nullptr && g != nullptr, "null argument");
        const herglotz::IbpCheck check =
            herglotz::ibp_check(to_config(cfg), f->f, g->f);
        if (lhs) *lhs = check.lhs;
        if (rhs) *rhs = check.rhs;
        if (boundary) *boundary = check.boundary_term;
        if (residual) *residual = check.residual;
    });
}

/* ------------------------------------------------------------------ problems */

hgz_status hgz_problem_from_json(const char* json_text, hgz_problem** out) {
    return guard([&] {
        require(out != nullptr && json_text != nullptr, "null argument");
        *out = new hgz_problem{herglotz::parse_problem_json(json_text)};
    });
}

hgz_status hgz_problem_custom(int dim, hgz_lagrangian_value_fn value,
                              hgz_lagrangian_grad_fn dx,
                              hgz_lagrangian_grad_fn dv,
                              hgz_lagrangian_value_fn dz, void* user,
                              const hgz_opconfig* cfg, const double* x_a,
                              const double* x_b, const int* xb_fixed,
                              double z_a, int maximize, hgz_problem** out) {
    return guard([&] {
        require(out != nullptr && value && dx && dv && dz && x_a != nullptr,
                "null argument");
        herglotz::Lagrangian lag;
        lag.value = [value, user](double t, std::span<const double> x,
                                  std::span<const double> v, double z) {
            return value(t, x.data(), v.data(), z, user);
        };
        lag.dx = [dx, user](double t, std::span<const double> x,
                            std::span<const double> v, double z,
                            std::span<double> o) {
            dx(t, x.data(), v.data(), z, o.data(), user);
        };
        lag.dv = [dv, user](double t, std::span<const double> x,
                            std::span<const double> v, double z,
                            std::span<double> o) {
            dv(t, x.data(), v.data(), z, o.data(), user);
        };
        lag.dz = [dz, user](double t, std::span<const double> x,
                            std::span<const double> v, double z) {
            return dz(t, x.data(), v.data(), z, user);
        };
        std::vector<double> xa(x_a, x_a + dim);
        std::vector<std::optional<double>> xb(dim, std::nullopt);
        for (int j = 0; j < dim; ++j) {
            const bool fixed = xb_fixed ? (xb_fixed[j] != 0) : (x_b != nullptr);
            if (fixed) {
                require(x_b != nullptr, "x_b marked fixed but no values given");
                xb[j] = x_b[j];
            }
        }
        *out = new hgz_problem{herglotz::HerglotzProblem(
            dim, std::move(lag), to_config(cfg), std::move(xa), std::move(xb), z_a,
            maximize ? herglotz::Extremum::Maximize : herglotz::Extremum::Minimize)};
    });
}

int hgz_problem_dim(const hgz_problem* prob) { return prob ? prob->prob.dim() : 0; }

void hgz_problem_free(hgz_problem* prob) { delete prob; }

hgz_status hgz_check_partials(const hgz_problem* prob, int n_probes,
                              unsigned long long seed, double* worst_rel) {
    return guard([&] {
        require(prob != nullptr && worst_rel != nullptr, "null argument");
        *worst_rel = herglotz::check_partials(prob->prob, n_probes, seed).worst();
    });
}

/* ---------------------------------------------------------------- evaluation */

hgz_status hgz_evaluate_z(const hgz_problem* prob, const hgz_gridfn* x,
                          hgz_evaluation** out) {
    return guard([&] {
        require(prob != nullptr && x != nullptr && out != nullptr, "null argument");
        *out = new hgz_evaluation{herglotz::evaluate_z(prob->prob, x->f)};
    });
}

double hgz_evaluation_z_b(const hgz_evaluation* ev) {
    return ev ? ev->ev.z_b : std::nan("");
}

hgz_status hgz_evaluation_part(const hgz_evaluation* ev, char part,
                               hgz_gridfn** out) {
    return guard([&] {
        require(ev != nullptr && out != nullptr, "null argument");
        switch (part) {
            case 'x':
                *out = new hgz_gridfn{ev->ev.x};
                break;
            case 'v':
                *out = new hgz_gridfn{ev->ev.v};
                break;
            case 'z':
                *out = new hgz_gridfn{ev->ev.z};
                break;
            case 'l':
                *out = new hgz_gridfn{ev->ev.lambda};
                break;
            default:
                throw std::invalid_argument("part must be 'x', 'v', 'z' or 'l'");
        }
    });
}

void hgz_evaluation_free(hgz_evaluation* ev) { delete ev; }

hgz_status hgz_el_residual(const hgz_problem* prob, const hgz_evaluation* ev,
                           hgz_gridfn** out) {
    return guard([&] {
        require(prob != nullptr && ev != nullptr && out != nullptr, "null argument");
        *out = new hgz_gridfn{herglotz::el_residual(prob->prob, ev->ev)};
    });
}

hgz_status hgz_transversality(const hgz_problem* prob, const hgz_evaluation* ev,
                              double* out, int capacity, int* n_out) {
    return guard([&] {
        require(prob != nullptr && ev != nullptr && out != nullptr &&
                    n_out != nullptr,
                "null argument");
        const auto values = herglotz::transversality_residual(prob->prob, ev->ev);
        require(capacity >= static_cast<int>(values.size()),
                "output capacity too small");
        for (size_t i = 0; i < values.size(); ++i) out[i] = values[i];
        *n_out = static_cast<int>(values.size());
    });
}

/* -------------------------------------------------------------------- solver */

void hgz_solve_options_init(hgz_solve_options* opts) {
    if (!opts) return;
    const herglotz::SolveOptions defaults;
    opts->max_iterations = defaults.max_iterations;
    opts->gradient_tolerance = defaults.gradient_tolerance;
    opts->step_tolerance = defaults.step_tolerance;
    opts->fd_step = defaults.fd_step;
    opts->initial_guess = 0;
    opts->provided_guess = nullptr;
    opts->memory = defaults.memory;
    opts->max_line_search = defaults.max_line_search;
}

hgz_status hgz_solve(const hgz_problem* prob, int n_nodes,
                     const hgz_solve_options* opts, hgz_solve_result** out) {
    return guard([&] {
        require(prob != nullptr && out != nullptr, "null argument");
        const auto& pset = prob->prob.op_config().pset;
        const herglotz::Grid grid(pset.a, pset.b, n_nodes);
        *out = new hgz_solve_result{
            herglotz::solve_direct(prob->prob, grid, to_options(opts))};
    });
}

int hgz_solve_converged(const hgz_solve_result* r) {
    return r && r->r.converged ? 1 : 0;
}
int hgz_solve_iterations(const hgz_solve_result* r) {
    return r ? r->r.iterations : 0;
}
int hgz_solve_evaluations(const hgz_solve_result* r) {
    return r ? r->r.objective_evaluations : 0;
}
double hgz_solve_gradient_norm(const hgz_solve_result* r) {
    return r ? r->r.final_gradient_norm : std::nan("");
}
double hgz_solve_z_b(const hgz_solve_result* r) {
    return r ? r->r.z_b() : std::nan("");
}

hgz_status hgz_solve_trajectory(const hgz_solve_result* r, hgz_gridfn** out) {
    return guard([&] {
        require(r != nullptr && out != nullptr, "null argument");
        *out = new hgz_gridfn{r->r.evaluation.x};
    });
}

hgz_status hgz_solve_evaluation(const hgz_solve_result* r, hgz_evaluation** out) {
    return guard([&] {
        require(r != nullptr && out != nullptr, "null argument");
        *out = new hgz_evaluation{r->r.evaluation};
    });
}

hgz_status hgz_solve_el_supnorm(const hgz_solve_result* r, double* out,
                                int capacity, int* n_out) {
    return guard([&] {
        require(r != nullptr && out != nullptr && n_out != nullptr, "null argument");
        const auto& sup = r->r.el_residual_supnorm;
        require(capacity >= static_cast<int>(sup.size()), "output capacity too small");
        for (size_t i = 0; i < sup.size(); ++i) out[i] = sup[i];
        *n_out = static_cast<int>(sup.size());
    });
}

hgz_status hgz_solve_transversality(const hgz_solve_result* r, double* out,
                                    int capacity, int* n_out) {
    return guard([&] {
        require(r != nullptr && n_out != nullptr, "null argument");
        if (!r->r.transversality_residuals) {
            *n_out = 0;
            return;
        }
        const auto& values = *r->r.transversality_residuals;
        require(out != nullptr, "null output for transversality values");
        require(capacity >= static_cast<int>(values.size()),
                "output capacity too small");
        for (size_t i = 0; i < values.size(); ++i) out[i] = values[i];
        *n_out = static_cast<int>(values.size());
    });
}

void hgz_solve_result_free(hgz_solve_result* r) { delete r; }

hgz_status hgz_stationarity_probe(const hgz_problem* prob, const hgz_gridfn* x,
                                  double delta, double* worst_improvement) {
    return guard([&] {
        require(prob != nullptr && x != nullptr && worst_improvement != nullptr,
                "null argument");
        *worst_improvement = herglotz::stationarity_probe(prob->prob, x->f, delta);
    });
}

hgz_status hgz_convergence_study_json(const hgz_problem* prob, int n_nodes,
                                      int levels, const hgz_solve_options* opts,
                                      char** json_out) {
    return guard([&] {
        require(prob != nullptr && json_out != nullptr, "null argument");
        const auto& pset = prob->prob.op_config().pset;
        const herglotz::Grid grid(pset.a, pset.b, n_nodes);
        const herglotz::ConvergenceReport report =
            herglotz::refine_and_verify(prob->prob, grid, to_options(opts), levels);
        json j;
        j["levels"] = json::array();
        for (const auto& lvl : report.levels) {
            json e;
            e["n_nodes"] = lvl.n_nodes;
            e["z_b"] = lvl.z_b;
            e["converged"] = lvl.converged;
            e["gradient_norm"] = lvl.gradient_norm;
            e["el_residual_supnorm"] = lvl.el_supnorm;
            e["diff_to_previous"] = lvl.diff_to_previous;
            j["levels"].push_back(e);
        }
        j["residual_nonincreasing"] = report.residual_nonincreasing;
        const double order = report.observed_order();
        if (std::isfinite(order)) j["observed_order"] = order;
        *json_out = dup_string(j.dump(2));
    });
}

void hgz_string_free(char* text) { std::free(text); }

/* ------------------------------------------------------------------- noether */

hgz_status hgz_generator_translation(int dim, const double* direction,
                                     hgz_generator** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        std::vector<double> dir;
        if (direction) dir.assign(direction, direction + dim);
        *out = new hgz_generator{
            herglotz::TransformationFamily::translation(dim, std::move(dir))};
    });
}

hgz_status hgz_generator_scaling(hgz_generator** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        *out = new hgz_generator{herglotz::TransformationFamily::scaling()};
    });
}

hgz_status hgz_generator_table(const hgz_gridfn* table, hgz_generator** out) {
    return guard([&] {
        require(table != nullptr && out != nullptr, "null argument");
        *out = new hgz_generator{herglotz::TransformationFamily::from_table(table->f)};
    });
}

void hgz_generator_free(hgz_generator* gen) { delete gen; }

hgz_status hgz_invariance_defect(const hgz_problem* prob, const hgz_gridfn* x,
                                 const hgz_generator* gen, double s_step,
                                 double* out) {
    return guard([&] {
        require(prob != nullptr && x != nullptr && gen != nullptr && out != nullptr,
                "null argument");
        *out = herglotz::invariance_defect(prob->prob, x->f, gen->fam, s_step);
    });
}

hgz_status hgz_noether_operator(const hgz_gridfn* f, const hgz_gridfn* g,
                                const hgz_opconfig* cfg, hgz_gridfn** out) {
    return guard([&] {
        require(f != nullptr && g != nullptr && out != nullptr, "null argument");
        *out = new hgz_gridfn{herglotz::noether_operator(f->f, g->f, to_config(cfg))};
    });
}

hgz_status hgz_noether_residual(const hgz_problem* prob,
                                const hgz_evaluation* ev,
                                const hgz_generator* gen,
                                hgz_gridfn** pointwise, double* supnorm,
                                double* integral) {
    return guard([&] {
        require(prob != nullptr && ev != nullptr && gen != nullptr, "null argument");
        herglotz::NoetherResidual res =
            herglotz::noether_residual(prob->prob, ev->ev, gen->fam);
        if (supnorm) *supnorm = res.supnorm;
        if (integral) *integral = res.integral;
        if (pointwise) *pointwise = new hgz_gridfn{std::move(res.pointwise)};
    });
}

hgz_status hgz_variational_identity(const hgz_problem* prob,
                                    const hgz_gridfn* x,
                                    const hgz_generator* gen, double s_step,
                                    double* lhs, double* rhs,
                                    double* rel_defect) {
    return guard([&] {
        require(prob != nullptr && x != nullptr && gen != nullptr, "null argument");
        const herglotz::VariationalIdentity vi =
            herglotz::variational_identity(prob->prob, x->f, gen->fam, s_step);
        if (lhs) *lhs = vi.lhs;
        if (rhs) *rhs = vi.rhs;
        if (rel_defect) *rel_defect = vi.rel_defect;
    });
}

/* ---------------------------------------------------------------- oscillator */

void hgz_oscillator_params_init(hgz_oscillator_params* params) {
    if (!params) return;
    params->m = 1.0;
    params->k = 1.0;
    params->lambda0 = 0.0;
    params->classical = 0;
    params->alpha = 0.5;
    params->kernel = nullptr;
    params->b = 1.0;
    params->x0 = 0.0;
    params->xb_fixed = 0;
    params->xb = 0.0;
    params->z0 = 0.0;
}

hgz_status hgz_problem_oscillator(const hgz_oscillator_params* params,
                                  hgz_problem** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        *out = new hgz_problem{herglotz::oscillator_problem(to_oscillator(params))};
    });
}

hgz_status hgz_classical_reference(const hgz_oscillator_params* params,
                                   double t, double* out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        herglotz::OscillatorParams p = to_oscillator(params);
        p.alpha.reset();
        p.kernel.reset();
        *out = herglotz::classical_reference(p)(t);
    });
}

hgz_status hgz_oscillator_residual(const hgz_oscillator_params* params,
                                   const hgz_evaluation* ev, hgz_gridfn** out) {
    return guard([&] {
        require(ev != nullptr && out != nullptr, "null argument");
        *out = new hgz_gridfn{
            herglotz::oscillator_el_residual(to_oscillator(params), ev->ev)};
    });
}

hgz_status hgz_alpha_sweep_json(const hgz_oscillator_params* params,
                                const double* alphas, int n_alphas,
                                int n_nodes, const hgz_solve_options* opts,
                                const char* csv_dir, int jobs, char** json_out) {
    return guard([&] {
        require(json_out != nullptr, "output pointer is null");
        require(n_alphas == 0 || alphas != nullptr, "alphas array is null");
        const herglotz::OscillatorParams p = to_oscillator(params);
        const std::vector<double> orders(alphas, alphas + n_alphas);
        const herglotz::SweepTable table =
            herglotz::alpha_sweep(p, orders, n_nodes, to_options(opts), jobs);

        json j;
        j["rows"] = json::array();
        for (size_t i = 0; i < table.rows.size(); ++i) {
            json row = sweep_row_json(table.rows[i]);
            if (csv_dir && table.rows[i].solved) {
                char name[64];
                std::snprintf(name, sizeof(name), "trajectory_alpha_%.6g.csv",
                              table.rows[i].alpha);
                const auto path = std::filesystem::path(csv_dir) / name;
                herglotz::write_csv(table.trajectories[i], path.string());
                row["trajectory_csv"] = name;
            }
            j["rows"].push_back(row);
        }
        if (table.classical_curve) {
            json ref;
            if (csv_dir) {
                const auto path =
                    std::filesystem::path(csv_dir) / "trajectory_classical.csv";
                herglotz::write_csv(*table.classical_curve, path.string());
                ref["trajectory_csv"] = "trajectory_classical.csv";
            } else {
                ref = json::object();
            }
            j["classical_reference"] = ref;
        }
        *json_out = dup_string(j.dump(2));
    });
}
