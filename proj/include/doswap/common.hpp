#pragma once

#include <stdexcept>
#include <string>

namespace doswap {

// Bad arguments or malformed files. CLI maps this to exit code 2.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent run configuration (unknown keys, impossible settings).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or diverging optimization. CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A cycle where a DAG was required; the message names one offending cycle.
struct CycleError : std::runtime_error {
    explicit CycleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace doswap
