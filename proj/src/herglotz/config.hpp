#pragma once

#include <string>

#include "herglotz/problem.hpp"

namespace herglotz {

/// Configuration rejected: malformed text, unknown key, missing field or an
/// out-of-range value. The message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Kernel from its JSON description:
///   {"family": "power_law", "alpha": 0.5}     operator order; beta = 1-alpha
///   {"family": "power_law", "beta": 0.6}      explicit kernel exponent
///   {"family": "exponential", "rho": 1.0, "c": 1.0}
///   {"family": "tabulated", "samples": [[s, k], ...]}
KernelSpec parse_kernel_json(const std::string& json_text);

/// Problem from its JSON description (see README for the full schema):
/// dimension, a Lagrangian from the built-in registry (oscillator, quadratic,
/// polynomial), fractional order or classical flag, kernel, parameter set,
/// boundary data and extremum direction. Unknown keys are rejected by name.
HerglotzProblem parse_problem_json(const std::string& json_text);

}  // namespace herglotz
