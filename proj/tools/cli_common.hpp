#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "herglotz.h"

namespace cli {

// Exit codes shared by both binaries.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;    // bad flags, malformed config, missing file
constexpr int kExitNumeric = 3;   // domain errors, evaluation or solve failures
constexpr int kExitVerify = 4;    // a residual exceeded --fail-above

inline int exit_code_for(hgz_status status) {
    switch (status) {
        case HGZ_OK:
            return kExitOk;
        case HGZ_ERR_PARSE:
        case HGZ_ERR_INVALID_ARGUMENT:
        case HGZ_ERR_IO:
            return kExitConfig;
        default:
            return kExitNumeric;
    }
}

// Fails the command with the library's error message.
struct CommandError {
    int code;
    std::string message;
};

inline void check(hgz_status status, const std::string& context) {
    if (status != HGZ_OK) {
        throw CommandError{exit_code_for(status),
                           context + ": " + hgz_last_error()};
    }
}

inline void fail_config(const std::string& message) {
    throw CommandError{kExitConfig, message};
}

// Relative output paths resolve against HERGLOTZ_OUT_DIR when it is set.
inline std::string resolve_output(const std::string& path) {
    if (path.empty()) return path;
    const char* base = std::getenv("HERGLOTZ_OUT_DIR");
    if (!base || *base == '\0') return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base) / p).string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_config("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --kernel accepts "caputo" (power-law kernel at the given order), an inline
// JSON object, or a path to a JSON file.
inline std::string kernel_json_from_flag(const std::string& flag, double alpha) {
    if (flag == "caputo" || flag.empty()) {
        nlohmann::json j;
        j["family"] = "power_law";
        j["alpha"] = alpha;
        return j.dump();
    }
    if (!flag.empty() && flag.front() == '{') return flag;
    return read_file(flag);
}

inline std::vector<double> parse_doubles(const std::string& text,
                                         const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            fail_config(what + ": cannot parse \"" + cell + "\" as a number");
        }
    }
    return out;
}

inline hgz_pset parse_pset(const std::string& text) {
    const auto vals = parse_doubles(text, "--pset");
    if (vals.size() != 4) fail_config("--pset expects four values a,b,p,q");
    return hgz_pset{vals[0], vals[1], vals[2], vals[3]};
}

// Deterministic report envelope: data first-class, run metadata segregated.
inline nlohmann::json make_report(const std::string& command,
                                  nlohmann::json meta, nlohmann::json data) {
    nlohmann::json report;
    report["command"] = command;
    meta["tool"] = "herglotz";
    meta["version"] = hgz_version();
    report["meta"] = std::move(meta);
    report["data"] = std::move(data);
    return report;
}

inline void write_report(const nlohmann::json& report, const std::string& path,
                         bool also_stdout) {
    const std::string text = report.dump(2) + "\n";
    if (!path.empty()) {
        const std::string resolved = resolve_output(path);
        std::ofstream out(resolved);
        if (!out) fail_config("cannot write " + resolved);
        out << text;
    }
    if (also_stdout) std::cout << text;
}

// RAII wrappers for the common handle types.
struct GridFnPtr {
    hgz_gridfn* ptr = nullptr;
    ~GridFnPtr() { hgz_gridfn_free(ptr); }
    hgz_gridfn** out() { return &ptr; }
};
struct KernelPtr {
    hgz_kernel* ptr = nullptr;
    ~KernelPtr() { hgz_kernel_free(ptr); }
    hgz_kernel** out() { return &ptr; }
};
struct ProblemPtr {
    hgz_problem* ptr = nullptr;
    ~ProblemPtr() { hgz_problem_free(ptr); }
    hgz_problem** out() { return &ptr; }
};
struct EvaluationPtr {
    hgz_evaluation* ptr = nullptr;
    ~EvaluationPtr() { hgz_evaluation_free(ptr); }
    hgz_evaluation** out() { return &ptr; }
};
struct SolveResultPtr {
    hgz_solve_result* ptr = nullptr;
    ~SolveResultPtr() { hgz_solve_result_free(ptr); }
    hgz_solve_result** out() { return &ptr; }
};
struct GeneratorPtr {
    hgz_generator* ptr = nullptr;
    ~GeneratorPtr() { hgz_generator_free(ptr); }
    hgz_generator** out() { return &ptr; }
};
struct StringPtr {
    char* ptr = nullptr;
    ~StringPtr() { hgz_string_free(ptr); }
    char** out() { return &ptr; }
};

// Solver flags shared by the solving subcommands.
struct SolverFlags {
    hgz_solve_options opts;
    std::string guess = "linear";

    SolverFlags() { hgz_solve_options_init(&opts); }

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-iterations", opts.max_iterations,
                        "Optimizer iteration cap")
            ->capture_default_str();
        cmd->add_option("--gtol", opts.gradient_tolerance,
                        "Gradient sup-norm tolerance")
            ->capture_default_str();
        cmd->add_option("--step-tol", opts.step_tolerance,
                        "Relative step-size tolerance")
            ->capture_default_str();
        cmd->add_option("--fd-step", opts.fd_step,
                        "Relative finite-difference step for gradients")
            ->capture_default_str();
        cmd->add_option("--memory", opts.memory, "Quasi-Newton history length")
            ->capture_default_str();
        cmd->add_option("--guess", guess,
                        "Initial guess: linear | constant | <trajectory.csv>")
            ->capture_default_str();
    }

    // May allocate a provided-guess grid function; caller keeps it alive.
    void finalize(GridFnPtr& guess_holder) {
        if (guess == "linear") {
            opts.initial_guess = 0;
        } else if (guess == "constant") {
            opts.initial_guess = 1;
        } else {
            check(hgz_gridfn_read_csv(guess.c_str(), guess_holder.out()),
                  "reading --guess trajectory");
            opts.initial_guess = 2;
            opts.provided_guess = guess_holder.ptr;
        }
    }

    nlohmann::json meta() const {
        nlohmann::json j;
        j["max_iterations"] = opts.max_iterations;
        j["gradient_tolerance"] = opts.gradient_tolerance;
        j["step_tolerance"] = opts.step_tolerance;
        j["fd_step"] = opts.fd_step;
        j["memory"] = opts.memory;
        j["initial_guess"] = guess;
        return j;
    }
};

inline int run_command(int argc, char** argv, CLI::App& app,
                       const std::function<int()>& body) {
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }
    try {
        return body();
    } catch (const CommandError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace cli
