#pragma once

#include <stdexcept>
#include <string>

namespace emon {

// Iterative solver or minimizer failed to reach its tolerance.
struct NonConvergenceError : std::runtime_error {
  explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// The two lowest states cannot be separated from the third.
struct DoubletAmbiguityError : std::runtime_error {
  explicit DoubletAmbiguityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-facing configuration (CLI maps this to exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace emon
