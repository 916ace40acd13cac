#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hedgefit {

// Bad run configuration or CLI input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV parse errors carry row/column).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite value produced during model evaluation. Carries the parameter
// vector that triggered it and, once attached by the stepper, the expert id
// and step index for replay.
class EvalFault : public std::runtime_error {
public:
    EvalFault(const std::string& msg, std::vector<double> theta = {})
        : std::runtime_error(msg), theta(std::move(theta)) {}

    std::vector<double> theta;
    long expert_id = -1;
    long step = -1;
};

}  // namespace hedgefit
