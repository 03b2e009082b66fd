// End-to-end tests of the fracop and herglotz binaries. Paths to the built
// executables arrive through the FRACOP_BIN and HERGLOTZ_BIN environment
// variables (set by ctest); REPORT_SCHEMA points at the published schema.

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "schema_check.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

TEST_SUITE_BEGIN("cli");

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

fs::path workspace() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("hgz_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& command) {
    const fs::path out = workspace() / "stdout.txt";
    const fs::path err = workspace() / "stderr.txt";
    const std::string full =
        command + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(full.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

std::string binary(const char* env) {
    const char* path = std::getenv(env);
    REQUIRE_MESSAGE(path != nullptr, "environment variable not set");
    return path;
}

std::string fracop() { return binary("FRACOP_BIN"); }
std::string herglotz() { return binary("HERGLOTZ_BIN"); }

void write_csv(const fs::path& path, int n, double (*f)(double)) {
    std::ofstream out(path);
    out << "t,x_1\n";
    char buf[64];
    for (int i = 0; i < n; ++i) {
        const double t = i / double(n - 1);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, f(t));
        out << buf;
    }
}

json load_json(const fs::path& path) { return json::parse(slurp(path)); }

void check_schema(const json& report) {
    static const json schema = [] {
        const char* path = std::getenv("REPORT_SCHEMA");
        REQUIRE_MESSAGE(path != nullptr, "REPORT_SCHEMA not set");
        return json::parse(slurp(path));
    }();
    const auto errors = schema_check::validate_report(report, schema);
    for (const auto& e : errors) MESSAGE(e);
    CHECK(errors.empty());
}

fs::path write_herglotz_config() {
    const fs::path path = workspace() / "problem.json";
    std::ofstream out(path);
    out << R"({
        "lagrangian": {"type": "quadratic", "v2": 1.0, "z": 1.0},
        "classical": true,
        "pset": {"a": 0.0, "b": 1.0, "p": 1.0, "q": 0.0},
        "x_a": [0.0],
        "x_b": [1.0]
    })";
    return path;
}

const std::string kSolverFlags =
    " --gtol 1e-6 --max-iterations 20000 --memory 20 --step-tol 1e-14";

}  // namespace

TEST_CASE("fracop apply evaluates the half-order integral of one") {
    const fs::path input = workspace() / "one.csv";
    write_csv(input, 201, [](double) { return 1.0; });
    const fs::path output = workspace() / "K_one.csv";

    const RunResult r = run(fracop() + " apply --kernel caputo --alpha 0.5" +
                            " --pset 0,1,1,0 --op K --input " + input.string() +
                            " --output " + output.string());
    CHECK(r.exit_code == 0);

    // K[1](t) = sqrt(t)/Gamma(1.5).
    std::ifstream in(output);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x_1");
    const double coef = 2.0 / std::sqrt(M_PI);
    int row = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double t = std::stod(line.substr(0, comma));
        const double value = std::stod(line.substr(comma + 1));
        CHECK(std::abs(value - coef * std::sqrt(t)) <= 1e-10);
        ++row;
    }
    CHECK(row == 201);
}

TEST_CASE("fracop apply input validation") {
    const RunResult missing = run(fracop() +
                                  " apply --kernel caputo --alpha 0.5 --pset "
                                  "0,1,1,0 --op K --input /no/such.csv "
                                  "--output /tmp/out.csv");
    CHECK(missing.exit_code == 2);

    const fs::path input = workspace() / "one_small.csv";
    write_csv(input, 21, [](double) { return 1.0; });
    const RunResult conflict = run(
        fracop() + " apply --kernel caputo --alpha 0.5 --classical --pset 0,1,1,0"
                   " --op K --input " + input.string() + " --output /tmp/out.csv");
    CHECK(conflict.exit_code == 2);
    CHECK(conflict.err.find("--classical") != std::string::npos);

    const RunResult bad_alpha = run(
        fracop() + " apply --kernel caputo --alpha 1.5 --pset 0,1,1,0 --op B"
                   " --input " + input.string() + " --output /tmp/out.csv");
    CHECK(bad_alpha.exit_code == 2);
    CHECK(bad_alpha.err.find("alpha") != std::string::npos);
}

TEST_CASE("fracop ibp-check reproduces the worked value") {
    const fs::path f = workspace() / "line.csv";
    const fs::path g = workspace() / "unit.csv";
    write_csv(f, 2048, [](double t) { return t; });
    write_csv(g, 2048, [](double) { return 1.0; });

    const fs::path report = workspace() / "ibp.json";
    const RunResult r = run(fracop() + " ibp-check --kernel caputo --alpha 0.5" +
                            " --pset 0,1,1,0 --f " + f.string() + " --g " +
                            g.string() + " --report " + report.string());
    CHECK(r.exit_code == 0);

    const json from_stdout = json::parse(r.out);
    const json from_file = load_json(report);
    CHECK(from_stdout == from_file);
    check_schema(from_file);

    const double lhs = from_file["data"]["lhs"].get<double>();
    CHECK(std::abs(lhs - 0.7522527780636751) <= 1e-4);

    // A hopeless threshold must flip the exit code.
    const RunResult gated =
        run(fracop() + " ibp-check --kernel caputo --alpha 0.5 --pset 0,1,1,0" +
            " --f " + f.string() + " --g " + g.string() + " --fail-above 1e-9");
    CHECK(gated.exit_code == 4);
}

TEST_CASE("herglotz solve writes a deterministic report and trajectory") {
    const fs::path config = write_herglotz_config();
    const fs::path sol1 = workspace() / "sol1.csv";
    const fs::path sol2 = workspace() / "sol2.csv";
    const fs::path rep1 = workspace() / "rep1.json";
    const fs::path rep2 = workspace() / "rep2.json";

    const std::string base = herglotz() + " solve --config " + config.string() +
                             " --nodes 101" + kSolverFlags;
    const RunResult r1 =
        run(base + " --out " + sol1.string() + " --report " + rep1.string());
    CHECK(r1.exit_code == 0);
    const RunResult r2 =
        run(base + " --out " + sol2.string() + " --report " + rep2.string());
    CHECK(r2.exit_code == 0);

    CHECK(slurp(sol1) == slurp(sol2));
    CHECK(slurp(rep1) == slurp(rep2));

    const json report = load_json(rep1);
    check_schema(report);
    CHECK(report["command"] == "solve");
    CHECK(report["data"]["converged"] == true);
    // z(t) = e^t (e^t - 1) / (2 (e-1)^2) along the extremal, so
    // z(1) = e / (2 (e-1)).
    CHECK(report["data"]["z_b"].get<double>() ==
          doctest::Approx(M_E / (2.0 * (M_E - 1.0))).epsilon(1e-3));
}

TEST_CASE("herglotz solve rejects malformed configs by name") {
    const fs::path bad = workspace() / "bad.json";
    {
        std::ofstream out(bad);
        out << R"({
            "lagrangian": {"type": "quadratic"},
            "classical": true,
            "pset": {"a": 0, "b": 1, "p": 1, "q": 0},
            "x_a": [0.0],
            "frobnicate": 1
        })";
    }
    const RunResult r =
        run(herglotz() + " solve --config " + bad.string() + " --nodes 51");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("frobnicate") != std::string::npos);

    const RunResult gone =
        run(herglotz() + " solve --config /no/such/config.json");
    CHECK(gone.exit_code == 2);
}

TEST_CASE("herglotz verify gates on perturbed solutions") {
    const fs::path config = write_herglotz_config();
    const fs::path solution = workspace() / "verify_sol.csv";
    const RunResult solved =
        run(herglotz() + " solve --config " + config.string() + " --nodes 101" +
            kSolverFlags + " --out " + solution.string());
    REQUIRE(solved.exit_code == 0);

    const fs::path report = workspace() / "verify.json";
    const RunResult ok =
        run(herglotz() + " verify --config " + config.string() + " --solution " +
            solution.string() + " --fail-above 0.01 --report " + report.string());
    CHECK(ok.exit_code == 0);
    const json rep = load_json(report);
    check_schema(rep);
    CHECK(rep["data"]["partials_worst_rel"].get<double>() <= 1e-6);

    // Bend the trajectory in the middle and watch the gate trip.
    const fs::path bent = workspace() / "verify_bent.csv";
    {
        std::ifstream in(solution);
        std::ofstream out(bent);
        std::string line;
        std::getline(in, line);
        out << line << "\n";
        int row = 0;
        char buf[80];
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            const double t = std::stod(line.substr(0, comma));
            double x = std::stod(line.substr(comma + 1));
            if (row > 30 && row < 70) x += 0.05;
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, x);
            out << buf;
            ++row;
        }
    }
    const RunResult tripped =
        run(herglotz() + " verify --config " + config.string() + " --solution " +
            bent.string() + " --fail-above 1e-3");
    CHECK(tripped.exit_code == 4);
}

TEST_CASE("herglotz noether reports the invariance diagnostics") {
    const fs::path config = write_herglotz_config();
    const fs::path solution = workspace() / "noether_sol.csv";
    REQUIRE(run(herglotz() + " solve --config " + config.string() +
                " --nodes 201" + kSolverFlags + " --out " + solution.string())
                .exit_code == 0);

    const fs::path report = workspace() / "noether.json";
    const RunResult r = run(herglotz() + " noether --config " + config.string() +
                            " --solution " + solution.string() +
                            " --generator translation --report " + report.string());
    CHECK(r.exit_code == 0);
    const json rep = load_json(report);
    check_schema(rep);
    CHECK(std::abs(rep["data"]["invariance_defect"].get<double>()) <= 1e-8);
    CHECK(rep["data"]["noether_supnorm"].get<double>() <= 1e-2);
    CHECK(rep["data"]["variational_identity"]["rel_defect"].get<double>() <= 1e-3);
}

TEST_CASE("herglotz oscillator sweep emits trajectories and a table") {
    const fs::path dir = workspace() / "sweep";
    const fs::path report = workspace() / "sweep.json";
    const RunResult r = run(herglotz() +
                            " oscillator --m 1 --k 1 --lambda0 0 --b 2.0"
                            " --x0 1 --xb " + std::to_string(std::cos(2.0)) +
                            " --nodes 51 --sweep 0.7,0.9 --out-dir " +
                            dir.string() + " --report " + report.string() +
                            kSolverFlags);
    CHECK(r.exit_code == 0);
    const json rep = load_json(report);
    check_schema(rep);
    REQUIRE(rep["data"]["rows"].size() == 2);
    for (const auto& row : rep["data"]["rows"]) {
        CHECK(row["solved"] == true);
        CHECK(fs::exists(dir / row["trajectory_csv"].get<std::string>()));
    }
    CHECK(fs::exists(dir / "trajectory_classical.csv"));
    // Memory weakens as alpha rises: closer to the classical curve.
    const double d1 = rep["data"]["rows"][0]["diff_to_classical"].get<double>();
    const double d2 = rep["data"]["rows"][1]["diff_to_classical"].get<double>();
    CHECK(d2 < d1);
}

TEST_CASE("herglotz oscillator rejects conflicting mode flags") {
    const RunResult r = run(herglotz() +
                            " oscillator --alpha 0.5 --classical --x0 0 --xb 1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("relative outputs resolve against HERGLOTZ_OUT_DIR") {
    const fs::path config = write_herglotz_config();
    const fs::path outdir = workspace() / "envout";
    fs::create_directories(outdir);
    const RunResult r = run("HERGLOTZ_OUT_DIR=" + outdir.string() + " " +
                            herglotz() + " solve --config " + config.string() +
                            " --nodes 51" + kSolverFlags +
                            " --out env_sol.csv --report env_rep.json");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(outdir / "env_sol.csv"));
    CHECK(fs::exists(outdir / "env_rep.json"));
}

TEST_CASE("help exits cleanly for every subcommand") {
    for (const char* sub : {"apply", "ibp-check"}) {
        CHECK(run(fracop() + " " + sub + " --help").exit_code == 0);
    }
    for (const char* sub :
         {"solve", "verify", "noether", "oscillator", "convergence"}) {
        CHECK(run(herglotz() + std::string(" ") + sub + " --help").exit_code == 0);
    }
}

TEST_CASE("herglotz convergence reports second order on the classical problem") {
    const fs::path config = write_herglotz_config();
    const fs::path report = workspace() / "conv.json";
    const RunResult r =
        run(herglotz() + " convergence --config " + config.string() +
            " --nodes 26 --levels 3 --report " + report.string() + kSolverFlags);
    CHECK(r.exit_code == 0);
    const json rep = load_json(report);
    check_schema(rep);
    REQUIRE(rep["data"]["levels"].size() == 3);
    const double order = rep["data"]["observed_order"].get<double>();
    CHECK(order >= 1.5);
    CHECK(order <= 2.5);
}

TEST_SUITE_END();
