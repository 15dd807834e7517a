#pragma once

#include <stdexcept>
#include <string>

namespace latfront {

/// Bad model/run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested run does not fit declared resources: horizon or window too small
/// (CLI exit code 3).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation outside a realized media horizon. Never extrapolated silently.
struct OutOfHorizonError : std::runtime_error {
    explicit OutOfHorizonError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Time stepping produced values outside the invariant bounds (CLI exit code 5).
struct IntegrationError : std::runtime_error {
    explicit IntegrationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Root bracketing or iteration failure in the speed calculus.
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace latfront
