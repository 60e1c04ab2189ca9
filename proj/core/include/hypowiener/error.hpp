#pragma once

#include <stdexcept>
#include <string>

namespace hypowiener {

// Bad input: malformed configuration, out-of-range parameters, mismatched
// dimensions. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure could not meet its tolerance within its budget
// (quadrature non-convergence, bisection failure, exhausted sample budget).
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace hypowiener
