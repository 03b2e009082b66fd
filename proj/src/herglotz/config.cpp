#include "herglotz/config.hpp"

#include <json.hpp>

#include "herglotz/lagrangians.hpp"

namespace herglotz {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

double get_number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) {
        throw ConfigError("missing required field \"" + std::string(key) + "\" in " + where);
    }
    if (!obj[key].is_number()) {
        throw ConfigError("field \"" + std::string(key) + "\" in " + where +
                          " must be a number");
    }
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return obj[key].get<double>();
}

json parse_text(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("malformed JSON in " + what);
    }
    return j;
}

KernelSpec kernel_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("kernel description must be a JSON object");
    }
    if (!j.contains("family") || !j["family"].is_string()) {
        throw ConfigError("kernel needs a \"family\" string");
    }
    const std::string family = j["family"].get<std::string>();
    if (family == "power_law") {
        reject_unknown_keys(j, "kernel", {"family", "alpha", "beta"});
        const bool has_alpha = j.contains("alpha");
        const bool has_beta = j.contains("beta");
        if (has_alpha == has_beta) {
            throw ConfigError(
                "power_law kernel takes exactly one of \"alpha\" (operator order) "
                "or \"beta\" (kernel exponent)");
        }
        if (has_beta) return KernelSpec::power_law(get_number(j, "kernel", "beta"));
        const double alpha = get_number(j, "kernel", "alpha");
        try {
            return KernelSpec::caputo(FractionalOrder(alpha));
        } catch (const std::domain_error& e) {
            throw ConfigError(std::string("kernel field \"alpha\": ") + e.what());
        }
    }
    if (family == "exponential") {
        reject_unknown_keys(j, "kernel", {"family", "rho", "c"});
        return KernelSpec::exponential(get_number(j, "kernel", "rho"),
                                       get_number(j, "kernel", "c"));
    }
    if (family == "tabulated") {
        reject_unknown_keys(j, "kernel", {"family", "samples"});
        if (!j.contains("samples") || !j["samples"].is_array()) {
            throw ConfigError("tabulated kernel needs a \"samples\" array");
        }
        std::vector<double> s, k;
        for (const auto& pair : j["samples"]) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ConfigError("tabulated samples must be [s, k] pairs");
            }
            s.push_back(pair[0].get<double>());
            k.push_back(pair[1].get<double>());
        }
        return KernelSpec::tabulated(std::move(s), std::move(k));
    }
    throw ConfigError("unknown kernel family \"" + family + "\"");
}

Lagrangian lagrangian_from_json(const json& j, int dim) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw ConfigError("lagrangian needs a \"type\" string");
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "oscillator") {
        reject_unknown_keys(j, "lagrangian", {"type", "m", "k", "lambda0"});
        return oscillator_lagrangian(get_number_or(j, "m", 1.0),
                                     get_number_or(j, "k", 1.0),
                                     get_number_or(j, "lambda0", 0.0));
    }
    if (type == "quadratic") {
        reject_unknown_keys(j, "lagrangian", {"type", "v2", "x2", "z", "const"});
        return quadratic_lagrangian(get_number_or(j, "v2", 1.0),
                                    get_number_or(j, "x2", 0.0),
                                    get_number_or(j, "z", 0.0),
                                    get_number_or(j, "const", 0.0));
    }
    if (type == "polynomial") {
        reject_unknown_keys(j, "lagrangian", {"type", "terms"});
        if (!j.contains("terms") || !j["terms"].is_array()) {
            throw ConfigError("polynomial lagrangian needs a \"terms\" array");
        }
        std::vector<PolynomialTerm> terms;
        for (const auto& tj : j["terms"]) {
            reject_unknown_keys(tj, "polynomial term", {"coef", "t", "x", "v", "z"});
            PolynomialTerm term;
            term.coef = get_number(tj, "polynomial term", "coef");
            term.pt = tj.contains("t") ? tj["t"].get<int>() : 0;
            term.pz = tj.contains("z") ? tj["z"].get<int>() : 0;
            auto read_exps = [&](const char* key) {
                std::vector<int> exps(dim, 0);
                if (tj.contains(key)) {
                    if (!tj[key].is_array() ||
                        tj[key].size() != static_cast<std::size_t>(dim)) {
                        throw ConfigError("polynomial term \"" + std::string(key) +
                                          "\" must list one exponent per component");
                    }
                    for (int c = 0; c < dim; ++c) exps[c] = tj[key][c].get<int>();
                }
                return exps;
            };
            term.px = read_exps("x");
            term.pv = read_exps("v");
            terms.push_back(std::move(term));
        }
        return polynomial_lagrangian(dim, std::move(terms));
    }
    throw ConfigError("unknown lagrangian type \"" + type + "\"");
}

}  // namespace

KernelSpec parse_kernel_json(const std::string& json_text) {
    return kernel_from_json(parse_text(json_text, "kernel description"));
}

HerglotzProblem parse_problem_json(const std::string& json_text) {
    const json j = parse_text(json_text, "problem description");
    if (!j.is_object()) {
        throw ConfigError("problem description must be a JSON object");
    }
    reject_unknown_keys(j, "problem",
                        {"dim", "lagrangian", "alpha", "classical", "kernel", "pset",
                         "x_a", "x_b", "z_a", "direction"});

    const int dim = j.contains("dim") ? j["dim"].get<int>() : 1;
    if (dim < 1) throw ConfigError("field \"dim\" must be >= 1");

    if (!j.contains("lagrangian")) {
        throw ConfigError("missing required field \"lagrangian\" in problem");
    }
    Lagrangian lag = lagrangian_from_json(j["lagrangian"], dim);

    const bool classical = j.contains("classical") && j["classical"].get<bool>();
    if (classical && j.contains("alpha")) {
        throw ConfigError("fields \"alpha\" and \"classical\" conflict; give one");
    }
    if (!classical && !j.contains("alpha")) {
        throw ConfigError("problem needs either \"alpha\" or \"classical\": true");
    }

    if (!j.contains("pset") || !j["pset"].is_object()) {
        throw ConfigError("missing required field \"pset\" in problem");
    }
    const json& pj = j["pset"];
    reject_unknown_keys(pj, "pset", {"a", "b", "p", "q"});
    ParameterSet pset(get_number(pj, "pset", "a"), get_number(pj, "pset", "b"),
                      get_number(pj, "pset", "p"), get_number(pj, "pset", "q"));

    OperatorConfig op = [&]() {
        if (classical) {
            if (j.contains("kernel")) {
                throw ConfigError("field \"kernel\" conflicts with \"classical\": true");
            }
            return OperatorConfig::classical(pset);
        }
        const double alpha = get_number(j, "problem", "alpha");
        FractionalOrder order = [&]() {
            try {
                return FractionalOrder(alpha);
            } catch (const std::domain_error& e) {
                throw ConfigError(std::string("field \"alpha\": ") + e.what());
            }
        }();
        KernelSpec kernel = j.contains("kernel") ? kernel_from_json(j["kernel"])
                                                 : KernelSpec::caputo(order);
        return OperatorConfig::fractional(order, std::move(kernel), pset);
    }();

    if (!j.contains("x_a") || !j["x_a"].is_array() ||
        j["x_a"].size() != static_cast<std::size_t>(dim)) {
        throw ConfigError("field \"x_a\" must list one value per component");
    }
    std::vector<double> x_a;
    for (const auto& v : j["x_a"]) x_a.push_back(v.get<double>());

    std::vector<std::optional<double>> x_b(dim, std::nullopt);
    if (j.contains("x_b")) {
        if (!j["x_b"].is_array() || j["x_b"].size() != static_cast<std::size_t>(dim)) {
            throw ConfigError(
                "field \"x_b\" must list one value (or null for free) per component");
        }
        for (int c = 0; c < dim; ++c) {
            if (!j["x_b"][c].is_null()) x_b[c] = j["x_b"][c].get<double>();
        }
    }

    const double z_a = get_number_or(j, "z_a", 0.0);

    Extremum dir = Extremum::Minimize;
    if (j.contains("direction")) {
        const std::string d = j["direction"].get<std::string>();
        if (d == "min") {
            dir = Extremum::Minimize;
        } else if (d == "max") {
            dir = Extremum::Maximize;
        } else {
            throw ConfigError("field \"direction\" must be \"min\" or \"max\"");
        }
    }

    try {
        return HerglotzProblem(dim, std::move(lag), std::move(op), std::move(x_a),
                               std::move(x_b), z_a, dir);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid problem data: ") + e.what());
    }
}

}  // namespace herglotz
