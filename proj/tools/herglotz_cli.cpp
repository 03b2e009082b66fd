// herglotz: solve Herglotz-type variational problems by direct transcription
// and verify the Euler-Lagrange, transversality and Noether identities on
// computed trajectories.

#include <cmath>

#include "cli_common.hpp"

using namespace cli;
using nlohmann::json;

namespace {

void load_problem(const std::string& config_path, ProblemPtr& prob) {
    if (!std::filesystem::exists(config_path)) {
        fail_config("config file does not exist: " + config_path);
    }
    const std::string text = read_file(config_path);
    check(hgz_problem_from_json(text.c_str(), prob.out()), "parsing --config");
}

json solve_data(const hgz_solve_result* result, int dim) {
    json data;
    data["z_b"] = hgz_solve_z_b(result);
    data["converged"] = hgz_solve_converged(result) != 0;
    data["iterations"] = hgz_solve_iterations(result);
    data["gradient_norm"] = hgz_solve_gradient_norm(result);
    data["objective_evaluations"] = hgz_solve_evaluations(result);

    std::vector<double> sup(dim);
    int n = 0;
    check(hgz_solve_el_supnorm(result, sup.data(), dim, &n), "reading residuals");
    data["el_residual_supnorm"] = std::vector<double>(sup.begin(), sup.begin() + n);

    std::vector<double> tc(dim);
    check(hgz_solve_transversality(result, tc.data(), dim, &n),
          "reading transversality");
    data["transversality"] = std::vector<double>(tc.begin(), tc.begin() + n);
    return data;
}

json evaluation_data(const hgz_problem* prob, const hgz_evaluation* ev) {
    json data;
    data["z_b"] = hgz_evaluation_z_b(ev);

    GridFnPtr el;
    check(hgz_el_residual(prob, ev, el.out()), "computing the EL residual");
    data["el_residual_supnorm"] = hgz_residual_sup(el.ptr);
    data["el_residual_boundary_sup"] = hgz_residual_boundary_sup(el.ptr);

    const int dim = hgz_problem_dim(prob);
    std::vector<double> tc(dim);
    int n_tc = 0;
    const hgz_status status = hgz_transversality(prob, ev, tc.data(), dim, &n_tc);
    if (status == HGZ_OK) {
        data["transversality"] = std::vector<double>(tc.begin(), tc.begin() + n_tc);
    } else {
        data["transversality"] = json::array();  // every endpoint fixed
    }
    return data;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Herglotz variational problems with memory kernels"};
    app.require_subcommand(1);

    // ------------------------------------------------------------------ solve
    auto* solve = app.add_subcommand("solve", "Extremize z(b) over trajectories");
    std::string solve_config, solve_out, solve_report;
    int solve_nodes = 201;
    SolverFlags solve_flags;
    solve->add_option("--config", solve_config, "Problem JSON file")->required();
    solve->add_option("--nodes", solve_nodes, "Grid nodes")->capture_default_str();
    solve->add_option("--out", solve_out, "Write the solution trajectory CSV here");
    solve->add_option("--report", solve_report, "Write the JSON report here");
    solve_flags.attach(solve);

    // ----------------------------------------------------------------- verify
    auto* verify = app.add_subcommand(
        "verify", "Residual diagnostics for a trajectory against a problem");
    std::string verify_config, verify_solution, verify_report, verify_residuals;
    double verify_fail_above = -1.0;
    unsigned long long verify_seed = 12345;
    int verify_probes = 64;
    verify->add_option("--config", verify_config, "Problem JSON file")->required();
    verify->add_option("--solution", verify_solution, "Trajectory CSV")->required();
    verify->add_option("--report", verify_report, "Write the JSON report here");
    verify->add_option("--residuals", verify_residuals,
                       "Write the pointwise EL residual CSV here");
    verify->add_option("--fail-above", verify_fail_above,
                       "Exit nonzero when a residual exceeds this value");
    verify->add_option("--seed", verify_seed, "Seed for the partials probe")
        ->capture_default_str();
    verify->add_option("--probes", verify_probes,
                       "Random states for the partials probe")
        ->capture_default_str();

    // ---------------------------------------------------------------- noether
    auto* noether = app.add_subcommand(
        "noether", "Invariance defect and conserved-quantity residual");
    std::string noe_config, noe_solution, noe_generator = "translation";
    std::string noe_report, noe_pointwise, noe_direction;
    double noe_s_step = 1e-5, noe_fail_above = -1.0;
    noether->add_option("--config", noe_config, "Problem JSON file")->required();
    noether->add_option("--solution", noe_solution, "Trajectory CSV")->required();
    noether
        ->add_option("--generator", noe_generator,
                     "translation | scaling | <table.csv>")
        ->capture_default_str();
    noether->add_option("--direction", noe_direction,
                        "Translation direction, comma separated");
    noether->add_option("--s-step", noe_s_step, "Variation step in (1e-8, 1e-2)")
        ->capture_default_str();
    noether->add_option("--report", noe_report, "Write the JSON report here");
    noether->add_option("--pointwise", noe_pointwise,
                        "Write the pointwise Noether residual CSV here");
    noether->add_option("--fail-above", noe_fail_above,
                        "Exit nonzero when the residual sup exceeds this value");

    // ------------------------------------------------------------- oscillator
    auto* osc = app.add_subcommand(
        "oscillator", "Damped oscillator with memory: solve or alpha sweep");
    double osc_m = 1.0, osc_k = 1.0, osc_lambda0 = 0.0, osc_alpha = 0.5;
    double osc_b = 1.0, osc_x0 = 0.0, osc_xb = 0.0, osc_z0 = 0.0;
    bool osc_classical = false;
    bool osc_xb_given = false;
    std::string osc_kernel = "caputo", osc_sweep, osc_out_dir = ".", osc_report;
    int osc_nodes = 201, osc_jobs = 1;
    SolverFlags osc_flags;
    osc->add_option("--m", osc_m, "Mass")->capture_default_str();
    osc->add_option("--k", osc_k, "Elasticity")->capture_default_str();
    osc->add_option("--lambda0", osc_lambda0, "z-coupling (damping rate)")
        ->capture_default_str();
    auto* osc_alpha_opt =
        osc->add_option("--alpha", osc_alpha, "Fractional order in (0,1)");
    osc->add_flag("--classical", osc_classical, "Memoryless mode");
    osc->add_option("--kernel", osc_kernel,
                    "Kernel: caputo | inline JSON | path to JSON file")
        ->capture_default_str();
    osc->add_option("--b", osc_b, "Horizon")->capture_default_str();
    osc->add_option("--x0", osc_x0, "x(0)")->capture_default_str();
    osc->add_option("--xb", osc_xb, "x(b); omit to leave the endpoint free")
        ->each([&osc_xb_given](const std::string&) { osc_xb_given = true; });
    osc->add_option("--z0", osc_z0, "z(0)")->capture_default_str();
    osc->add_option("--nodes", osc_nodes, "Grid nodes")->capture_default_str();
    osc->add_option("--sweep", osc_sweep,
                    "Comma-separated fractional orders to sweep");
    osc->add_option("--out-dir", osc_out_dir, "Directory for trajectory CSVs")
        ->capture_default_str();
    osc->add_option("--report", osc_report, "Write the JSON report here");
    osc->add_option("--jobs", osc_jobs, "Concurrent solves across sweep entries")
        ->capture_default_str();
    osc_flags.attach(osc);

    // ------------------------------------------------------------ convergence
    auto* conv = app.add_subcommand(
        "convergence", "Solve on nested grids and report the z_b sequence");
    std::string conv_config, conv_report;
    int conv_nodes = 51, conv_levels = 3;
    SolverFlags conv_flags;
    conv->add_option("--config", conv_config, "Problem JSON file")->required();
    conv->add_option("--nodes", conv_nodes, "Coarsest grid nodes")
        ->capture_default_str();
    conv->add_option("--levels", conv_levels, "Refinement levels")
        ->capture_default_str();
    conv->add_option("--report", conv_report, "Write the JSON report here");
    conv_flags.attach(conv);

    return run_command(argc, argv, app, [&]() -> int {
        // ---------------------------------------------------------------- solve
        if (solve->parsed()) {
            ProblemPtr prob;
            load_problem(solve_config, prob);
            GridFnPtr guess_holder;
            solve_flags.finalize(guess_holder);
            SolveResultPtr result;
            check(hgz_solve(prob.ptr, solve_nodes, &solve_flags.opts, result.out()),
                  "solving");
            if (!solve_out.empty()) {
                GridFnPtr x;
                check(hgz_solve_trajectory(result.ptr, x.out()), "reading solution");
                check(hgz_gridfn_write_csv(x.ptr, resolve_output(solve_out).c_str()),
                      "writing --out");
            }
            json meta = solve_flags.meta();
            meta["config"] = solve_config;
            meta["nodes"] = solve_nodes;
            write_report(
                make_report("solve", meta, solve_data(result.ptr,
                                                      hgz_problem_dim(prob.ptr))),
                solve_report, solve_report.empty());
            return hgz_solve_converged(result.ptr) ? kExitOk : kExitNumeric;
        }

        // --------------------------------------------------------------- verify
        if (verify->parsed()) {
            ProblemPtr prob;
            load_problem(verify_config, prob);
            if (!std::filesystem::exists(verify_solution)) {
                fail_config("solution file does not exist: " + verify_solution);
            }
            GridFnPtr x;
            check(hgz_gridfn_read_csv(verify_solution.c_str(), x.out()),
                  "reading --solution");
            EvaluationPtr ev;
            check(hgz_evaluate_z(prob.ptr, x.ptr, ev.out()), "evaluating z");

            json data = evaluation_data(prob.ptr, ev.ptr);
            double worst_partials = 0.0;
            check(hgz_check_partials(prob.ptr, verify_probes, verify_seed,
                                     &worst_partials),
                  "checking partials");
            data["partials_worst_rel"] = worst_partials;

            if (!verify_residuals.empty()) {
                GridFnPtr el;
                check(hgz_el_residual(prob.ptr, ev.ptr, el.out()),
                      "computing the EL residual");
                check(hgz_gridfn_write_csv(
                          el.ptr, resolve_output(verify_residuals).c_str()),
                      "writing --residuals");
            }

            json meta;
            meta["config"] = verify_config;
            meta["solution"] = verify_solution;
            meta["seed"] = verify_seed;
            meta["probes"] = verify_probes;
            if (verify_fail_above >= 0.0) meta["fail_above"] = verify_fail_above;
            write_report(make_report("verify", meta, data), verify_report,
                         verify_report.empty());

            if (verify_fail_above >= 0.0) {
                double gate = data["el_residual_supnorm"].get<double>();
                for (const auto& v : data["transversality"]) {
                    gate = std::max(gate, std::abs(v.get<double>()));
                }
                if (gate > verify_fail_above) return kExitVerify;
            }
            return kExitOk;
        }

        // -------------------------------------------------------------- noether
        if (noether->parsed()) {
            ProblemPtr prob;
            load_problem(noe_config, prob);
            if (!std::filesystem::exists(noe_solution)) {
                fail_config("solution file does not exist: " + noe_solution);
            }
            GridFnPtr x;
            check(hgz_gridfn_read_csv(noe_solution.c_str(), x.out()),
                  "reading --solution");

            GeneratorPtr gen;
            GridFnPtr table_holder;
            const int dim = hgz_problem_dim(prob.ptr);
            if (noe_generator == "translation") {
                std::vector<double> dir;
                if (!noe_direction.empty()) {
                    dir = parse_doubles(noe_direction, "--direction");
                    if (static_cast<int>(dir.size()) != dim) {
                        fail_config("--direction must list one value per component");
                    }
                }
                check(hgz_generator_translation(dim, dir.empty() ? nullptr : dir.data(),
                                                gen.out()),
                      "building generator");
            } else if (noe_generator == "scaling") {
                check(hgz_generator_scaling(gen.out()), "building generator");
            } else {
                check(hgz_gridfn_read_csv(noe_generator.c_str(), table_holder.out()),
                      "reading generator table");
                check(hgz_generator_table(table_holder.ptr, gen.out()),
                      "building generator");
            }

            EvaluationPtr ev;
            check(hgz_evaluate_z(prob.ptr, x.ptr, ev.out()), "evaluating z");

            double defect = 0.0;
            check(hgz_invariance_defect(prob.ptr, x.ptr, gen.ptr, noe_s_step,
                                        &defect),
                  "invariance defect");

            GridFnPtr pointwise;
            double supnorm = 0.0, integral = 0.0;
            check(hgz_noether_residual(prob.ptr, ev.ptr, gen.ptr, pointwise.out(),
                                       &supnorm, &integral),
                  "noether residual");
            if (!noe_pointwise.empty()) {
                check(hgz_gridfn_write_csv(
                          pointwise.ptr, resolve_output(noe_pointwise).c_str()),
                      "writing --pointwise");
            }

            double vi_lhs = 0.0, vi_rhs = 0.0, vi_rel = 0.0;
            check(hgz_variational_identity(prob.ptr, x.ptr, gen.ptr, noe_s_step,
                                           &vi_lhs, &vi_rhs, &vi_rel),
                  "variational identity");

            json data;
            data["invariance_defect"] = defect;
            data["noether_supnorm"] = supnorm;
            data["noether_integral"] = integral;
            data["variational_identity"] = {
                {"lhs", vi_lhs}, {"rhs", vi_rhs}, {"rel_defect", vi_rel}};
            json meta;
            meta["config"] = noe_config;
            meta["solution"] = noe_solution;
            meta["generator"] = noe_generator;
            meta["s_step"] = noe_s_step;
            if (noe_fail_above >= 0.0) meta["fail_above"] = noe_fail_above;
            write_report(make_report("noether", meta, data), noe_report,
                         noe_report.empty());

            if (noe_fail_above >= 0.0 && supnorm > noe_fail_above) {
                return kExitVerify;
            }
            return kExitOk;
        }

        // ----------------------------------------------------------- oscillator
        if (osc->parsed()) {
            if (osc_classical && !osc_alpha_opt->empty()) {
                fail_config("--alpha conflicts with --classical; give one of them");
            }
            hgz_oscillator_params params;
            hgz_oscillator_params_init(&params);
            params.m = osc_m;
            params.k = osc_k;
            params.lambda0 = osc_lambda0;
            params.classical = osc_classical ? 1 : 0;
            params.alpha = osc_alpha;
            params.b = osc_b;
            params.x0 = osc_x0;
            params.xb_fixed = osc_xb_given ? 1 : 0;
            params.xb = osc_xb;
            params.z0 = osc_z0;

            KernelPtr kernel;
            if (!osc_classical && osc_kernel != "caputo") {
                const std::string spec = kernel_json_from_flag(osc_kernel, osc_alpha);
                check(hgz_kernel_from_json(spec.c_str(), kernel.out()),
                      "building kernel");
                params.kernel = kernel.ptr;
            }

            GridFnPtr guess_holder;
            osc_flags.finalize(guess_holder);

            const std::string out_dir = resolve_output(osc_out_dir);
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (!std::filesystem::is_directory(out_dir)) {
                fail_config("cannot create output directory " + out_dir);
            }

            json meta;
            meta["m"] = osc_m;
            meta["k"] = osc_k;
            meta["lambda0"] = osc_lambda0;
            meta["classical"] = osc_classical;
            if (!osc_classical) meta["alpha"] = osc_alpha;
            meta["b"] = osc_b;
            meta["x0"] = osc_x0;
            if (osc_xb_given) meta["xb"] = osc_xb;
            meta["nodes"] = osc_nodes;
            meta["solver"] = osc_flags.meta();

            if (!osc_sweep.empty()) {
                const auto alphas = parse_doubles(osc_sweep, "--sweep");
                StringPtr table;
                check(hgz_alpha_sweep_json(&params, alphas.data(),
                                           static_cast<int>(alphas.size()), osc_nodes,
                                           &osc_flags.opts, out_dir.c_str(), osc_jobs,
                                           table.out()),
                      "alpha sweep");
                json data = json::parse(table.ptr);
                write_report(make_report("oscillator", meta, data), osc_report,
                             osc_report.empty());
                return kExitOk;
            }

            ProblemPtr prob;
            check(hgz_problem_oscillator(&params, prob.out()), "building problem");
            SolveResultPtr result;
            check(hgz_solve(prob.ptr, osc_nodes, &osc_flags.opts, result.out()),
                  "solving");
            GridFnPtr x;
            check(hgz_solve_trajectory(result.ptr, x.out()), "reading solution");
            const auto traj_path =
                std::filesystem::path(out_dir) / "trajectory.csv";
            check(hgz_gridfn_write_csv(x.ptr, traj_path.string().c_str()),
                  "writing trajectory");

            json data = solve_data(result.ptr, 1);
            data["trajectory_csv"] = "trajectory.csv";
            write_report(make_report("oscillator", meta, data), osc_report,
                         osc_report.empty());
            return hgz_solve_converged(result.ptr) ? kExitOk : kExitNumeric;
        }

        // ---------------------------------------------------------- convergence
        ProblemPtr prob;
        load_problem(conv_config, prob);
        GridFnPtr guess_holder;
        conv_flags.finalize(guess_holder);
        StringPtr study;
        check(hgz_convergence_study_json(prob.ptr, conv_nodes, conv_levels,
                                         &conv_flags.opts, study.out()),
              "convergence study");
        json meta = conv_flags.meta();
        meta["config"] = conv_config;
        meta["nodes"] = conv_nodes;
        meta["levels"] = conv_levels;
        write_report(make_report("convergence", meta, json::parse(study.ptr)),
                     conv_report, conv_report.empty());
        return kExitOk;
    });
}
