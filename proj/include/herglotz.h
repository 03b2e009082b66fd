/* C interface of the herglotz shared library.
 *
 * The library evaluates generalized fractional operators with memory
 * kernels (K, and the derived A and B derivatives), solves Herglotz-type
 * variational problems by direct transcription, and verifies the
 * Euler-Lagrange, transversality, integration-by-parts and Noether
 * identities on computed trajectories.
 *
 * Conventions:
 *   - every fallible call returns hgz_status; HGZ_OK is 0;
 *   - on failure, hgz_last_error() describes the problem (thread-local);
 *   - objects behind opaque handles are created by hgz_*_create-style
 *     functions and released with the matching hgz_*_free;
 *   - handles are safe to use from several threads for read-only calls.
 */

#ifndef HERGLOTZ_H
#define HERGLOTZ_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hgz_status {
    HGZ_OK = 0,
    HGZ_ERR_INVALID_ARGUMENT = -1, /* misuse of the API (null handle, ...) */
    HGZ_ERR_DOMAIN = -2,           /* value outside the mathematical domain */
    HGZ_ERR_EVALUATION = -3,       /* non-finite value along a trajectory */
    HGZ_ERR_SOLVE = -4,            /* solver setup failure */
    HGZ_ERR_IO = -5,               /* file could not be read or written */
    HGZ_ERR_PARSE = -6,            /* malformed or unknown configuration */
    HGZ_ERR_INTERNAL = -100
} hgz_status;

const char* hgz_version(void);

/* Message for the most recent failure on this thread. */
const char* hgz_last_error(void);

/* ---------------------------------------------------------------- kernels */

typedef struct hgz_kernel hgz_kernel;

/* k(s) = s^(beta-1)/Gamma(beta), beta in (0,1). */
hgz_status hgz_kernel_power_law(double beta, hgz_kernel** out);
/* k(s) = scale * exp(-rate*s). */
hgz_status hgz_kernel_exponential(double rate, double scale, hgz_kernel** out);
/* Positive samples (s[i], k[i]), s strictly increasing; log-log interpolation. */
hgz_status hgz_kernel_tabulated(const double* s, const double* k, size_t n,
                                hgz_kernel** out);
/* The kernel making B the standard Caputo derivative of order alpha. */
hgz_status hgz_kernel_caputo(double alpha, hgz_kernel** out);
/* {"family": "power_law"|"exponential"|"tabulated", ...}; see README. */
hgz_status hgz_kernel_from_json(const char* json_text, hgz_kernel** out);

hgz_status hgz_kernel_eval(const hgz_kernel* kernel, double s, double* out);
/* sigma >= 0 with k(s)*s^sigma bounded as s -> 0+; NaN on a null handle. */
double hgz_kernel_singularity_exponent(const hgz_kernel* kernel);
/* Sampled complete-monotonicity check; worst_violations must hold
 * max_order+1 entries (relative violation per derivative order). */
hgz_status hgz_kernel_check_monotonicity(const hgz_kernel* kernel, double s_min,
                                         double s_max, int n_samples,
                                         int max_order,
                                         double* worst_violations);
void hgz_kernel_free(hgz_kernel* kernel);

/* ---------------------------------------------------- parameter set, ops */

/* Interval [a, b] with the left/right integral weights p, q. */
typedef struct hgz_pset {
    double a;
    double b;
    double p;
    double q;
} hgz_pset;

/* <a,b,p,q> -> <a,b,q,p>. */
hgz_pset hgz_pset_adjoint(hgz_pset pset);

/* Operator configuration. When classical is nonzero, alpha and kernel are
 * ignored and the operators degenerate to their memoryless limits
 * (K -> (p+q)*id, B -> (p+q)*d/dt, A -> (p-q)*d/dt). */
typedef struct hgz_opconfig {
    double alpha;
    int classical;
    const hgz_kernel* kernel;
    hgz_pset pset;
} hgz_opconfig;

/* ----------------------------------------------------------- grid functions */

typedef struct hgz_gridfn hgz_gridfn;

/* values is node-major (node index outer, component inner) with
 * n_nodes*dim entries, or NULL for zeros. */
hgz_status hgz_gridfn_create(double a, double b, int n_nodes, int dim,
                             const double* values, hgz_gridfn** out);
/* CSV schema: header "t,x_1,...,x_d", one row per node, uniform grid. */
hgz_status hgz_gridfn_read_csv(const char* path, hgz_gridfn** out);
hgz_status hgz_gridfn_write_csv(const hgz_gridfn* f, const char* path);

int hgz_gridfn_nodes(const hgz_gridfn* f);
int hgz_gridfn_dim(const hgz_gridfn* f);
double hgz_gridfn_a(const hgz_gridfn* f);
double hgz_gridfn_b(const hgz_gridfn* f);
/* Copies all n_nodes*dim values, node-major. */
hgz_status hgz_gridfn_values(const hgz_gridfn* f, double* out);
/* Piecewise-linear interpolation at t in [a, b]; out has dim entries. */
hgz_status hgz_gridfn_eval(const hgz_gridfn* f, double t, double* out);
void hgz_gridfn_free(hgz_gridfn* f);

/* Default residual summary: sup norm away from the boundary bands (5% of
 * the interval per side, at least one node) where the one-sided stencils
 * of the A-differentiation dominate. */
double hgz_residual_sup(const hgz_gridfn* r);
double hgz_residual_boundary_sup(const hgz_gridfn* r);

/* --------------------------------------------------------------- operators */

/* op is 'K', 'A' or 'B'. */
hgz_status hgz_apply(char op, const hgz_opconfig* cfg, const hgz_gridfn* f,
                     hgz_gridfn** out);

/* Integration by parts: lhs = int g*B[f], rhs = [f*K*[g]] (at b minus at a)
 * minus int f*(K*[g])'; residual = |lhs-rhs|/(1+|lhs|). Any output pointer
 * may be NULL. */
hgz_status hgz_ibp_check(const hgz_opconfig* cfg, const hgz_gridfn* f,
                         const hgz_gridfn* g, double* lhs, double* rhs,
                         double* boundary, double* residual);

/* ---------------------------------------------------------------- problems */

typedef struct hgz_problem hgz_problem;

/* Full problem description as JSON; see README for the schema. */
hgz_status hgz_problem_from_json(const char* json_text, hgz_problem** out);

typedef double (*hgz_lagrangian_value_fn)(double t, const double* x,
                                          const double* v, double z,
                                          void* user);
typedef void (*hgz_lagrangian_grad_fn)(double t, const double* x,
                                       const double* v, double z, double* out,
                                       void* user);

/* Problem with caller-supplied Lagrangian callbacks. x_b lists endpoint
 * values per component; xb_fixed[i] == 0 marks component i free (x_b[i] is
 * then ignored). maximize nonzero flips the extremum direction. */
hgz_status hgz_problem_custom(int dim, hgz_lagrangian_value_fn value,
                              hgz_lagrangian_grad_fn dx,
                              hgz_lagrangian_grad_fn dv,
                              hgz_lagrangian_value_fn dz, void* user,
                              const hgz_opconfig* cfg, const double* x_a,
                              const double* x_b, const int* xb_fixed,
                              double z_a, int maximize, hgz_problem** out);

int hgz_problem_dim(const hgz_problem* prob);
void hgz_problem_free(hgz_problem* prob);

/* Compares supplied partials against central finite differences of the
 * Lagrangian at seeded random states; reports the worst relative error. */
hgz_status hgz_check_partials(const hgz_problem* prob, int n_probes,
                              unsigned long long seed, double* worst_rel);

/* -------------------------------------------------------------- evaluation */

typedef struct hgz_evaluation hgz_evaluation;

hgz_status hgz_evaluate_z(const hgz_problem* prob, const hgz_gridfn* x,
                          hgz_evaluation** out);
double hgz_evaluation_z_b(const hgz_evaluation* ev);
/* part: 'x' trajectory, 'v' generalized velocity, 'z' z-trajectory,
 * 'l' integrating factor lambda. Returns a fresh handle. */
hgz_status hgz_evaluation_part(const hgz_evaluation* ev, char part,
                               hgz_gridfn** out);
void hgz_evaluation_free(hgz_evaluation* ev);

/* Pointwise Euler-Lagrange defect lambda*dL/dx + A*[lambda*dL/dv]. */
hgz_status hgz_el_residual(const hgz_problem* prob, const hgz_evaluation* ev,
                           hgz_gridfn** out);

/* Natural-boundary values K*[lambda*dL/dv_j](b), one per free endpoint
 * component. Fails when every endpoint is fixed. */
hgz_status hgz_transversality(const hgz_problem* prob, const hgz_evaluation* ev,
                              double* out, int capacity, int* n_out);

/* ------------------------------------------------------------------ solver */

typedef struct hgz_solve_options {
    int max_iterations;        /* default 1000 */
    double gradient_tolerance; /* sup norm, default 1e-6 */
    double step_tolerance;     /* relative, default 1e-11 */
    double fd_step;            /* relative FD step, default 1e-6 */
    int initial_guess;         /* 0 linear interp, 1 constant left, 2 provided */
    const hgz_gridfn* provided_guess;
    int memory;          /* quasi-Newton pairs, default 10 */
    int max_line_search; /* default 50 */
} hgz_solve_options;

void hgz_solve_options_init(hgz_solve_options* opts);

typedef struct hgz_solve_result hgz_solve_result;

hgz_status hgz_solve(const hgz_problem* prob, int n_nodes,
                     const hgz_solve_options* opts, hgz_solve_result** out);

int hgz_solve_converged(const hgz_solve_result* r);
int hgz_solve_iterations(const hgz_solve_result* r);
int hgz_solve_evaluations(const hgz_solve_result* r);
double hgz_solve_gradient_norm(const hgz_solve_result* r);
double hgz_solve_z_b(const hgz_solve_result* r);
hgz_status hgz_solve_trajectory(const hgz_solve_result* r, hgz_gridfn** out);
hgz_status hgz_solve_evaluation(const hgz_solve_result* r, hgz_evaluation** out);
/* Default-summary EL residual sup norm per component. */
hgz_status hgz_solve_el_supnorm(const hgz_solve_result* r, double* out,
                                int capacity, int* n_out);
/* Transversality values; *n_out is 0 when every endpoint is fixed. */
hgz_status hgz_solve_transversality(const hgz_solve_result* r, double* out,
                                    int capacity, int* n_out);
void hgz_solve_result_free(hgz_solve_result* r);

/* Worst objective improvement over +-delta single-node perturbations of the
 * transcribed objective around x; ~0 certifies first-order stationarity. */
hgz_status hgz_stationarity_probe(const hgz_problem* prob, const hgz_gridfn* x,
                                  double delta, double* worst_improvement);

/* Solves on nested grids N, 2N-1, 4N-3, ... and reports z_b, trajectory
 * differences and residual norms as a JSON document (caller frees with
 * hgz_string_free). */
hgz_status hgz_convergence_study_json(const hgz_problem* prob, int n_nodes,
                                      int levels, const hgz_solve_options* opts,
                                      char** json_out);

void hgz_string_free(char* text);

/* ----------------------------------------------------------------- noether */

typedef struct hgz_generator hgz_generator;

/* Constant shift along direction (dim entries; NULL means all ones). */
hgz_status hgz_generator_translation(int dim, const double* direction,
                                     hgz_generator** out);
/* xi = x. */
hgz_status hgz_generator_scaling(hgz_generator** out);
/* xi(t) interpolated from a grid function (x-independent). */
hgz_status hgz_generator_table(const hgz_gridfn* table, hgz_generator** out);
void hgz_generator_free(hgz_generator* gen);

/* d/ds z[x + s*xi; b] at s=0 by central differences; ~0 means the family
 * leaves the functional invariant at x. s_step in (1e-8, 1e-2). */
hgz_status hgz_invariance_defect(const hgz_problem* prob, const hgz_gridfn* x,
                                 const hgz_generator* gen, double s_step,
                                 double* out);

/* O[f,g] = f*B[g] - g*A*[f] on scalar grid functions. */
hgz_status hgz_noether_operator(const hgz_gridfn* f, const hgz_gridfn* g,
                                const hgz_opconfig* cfg, hgz_gridfn** out);

/* Conserved-quantity defect along ev; pointwise may be NULL when only the
 * norms are wanted. */
hgz_status hgz_noether_residual(const hgz_problem* prob,
                                const hgz_evaluation* ev,
                                const hgz_generator* gen,
                                hgz_gridfn** pointwise, double* supnorm,
                                double* integral);

/* The variational identity theta(b)*lambda(b) =
 * int sum_j (dL/dx_j*xi_j + dL/dv_j*B[xi_j])*lambda dt, valid along any
 * trajectory. */
hgz_status hgz_variational_identity(const hgz_problem* prob,
                                    const hgz_gridfn* x,
                                    const hgz_generator* gen, double s_step,
                                    double* lhs, double* rhs,
                                    double* rel_defect);

/* ------------------------------------------------------------- oscillator */

/* Damped oscillator with memory on [0, b]: L = m/2 v^2 - k/2 x^2 +
 * lambda0 z with the left-sided parameter set <0, b, 1, 0>. classical
 * nonzero ignores alpha/kernel; kernel NULL defaults to the power-law
 * kernel of order alpha; xb_fixed == 0 leaves the right endpoint free. */
typedef struct hgz_oscillator_params {
    double m;
    double k;
    double lambda0;
    int classical;
    double alpha;
    const hgz_kernel* kernel;
    double b;
    double x0;
    int xb_fixed;
    double xb;
    double z0;
} hgz_oscillator_params;

void hgz_oscillator_params_init(hgz_oscillator_params* params);

hgz_status hgz_problem_oscillator(const hgz_oscillator_params* params,
                                  hgz_problem** out);

/* Closed-form classical solution of m x'' - m lambda0 x' + k x = 0 fitted
 * to the boundary data (x'(b) = 0 when the endpoint is free). */
hgz_status hgz_classical_reference(const hgz_oscillator_params* params,
                                   double t, double* out);

/* Equation-of-motion residual m*A*[e^(-lambda0 t) v] - k e^(-lambda0 t) x. */
hgz_status hgz_oscillator_residual(const hgz_oscillator_params* params,
                                   const hgz_evaluation* ev, hgz_gridfn** out);

/* Solves per fractional order, appends the classical reference, reports a
 * JSON table. csv_dir non-NULL writes one trajectory CSV per entry there.
 * jobs > 1 solves entries concurrently. */
hgz_status hgz_alpha_sweep_json(const hgz_oscillator_params* params,
                                const double* alphas, int n_alphas,
                                int n_nodes, const hgz_solve_options* opts,
                                const char* csv_dir, int jobs, char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HERGLOTZ_H */
