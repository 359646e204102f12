#pragma once

#include <stdexcept>
#include <string>

namespace transrec {

// Bad files, bad arguments, malformed records. CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite parameters, diverged optimization. CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace transrec
