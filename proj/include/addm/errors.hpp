#ifndef ADDM_ERRORS_HPP
#define ADDM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace addm {

// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user input: malformed config files, bad CLI arguments,
// inconsistent dimensions passed across module boundaries.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// An iterative process failed to reach its tolerance.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, std::vector<double> history = {})
      : Error(what), history(std::move(history)) {}
  std::vector<double> history;  // residual norms or zeta values, diagnostic
};

// Numerical breakdown inside a direct solver (e.g. a vanishing pivot).
struct FactorizationError : Error {
  explicit FactorizationError(const std::string& what) : Error(what) {}
};

// An operation was called on an object in the wrong state.
struct StateError : Error {
  explicit StateError(const std::string& what) : Error(what) {}
};

}  // namespace addm

#endif
