#ifndef BBAL_ERRORS_HPP
#define BBAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bbal {

// Invalid numeric input (non-finite values, negative variances, malformed
// probability rows).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear-algebra failure: a matrix that must be (semi)definite is not, even
// after jitter escalation.
class MatrixError : public std::runtime_error {
 public:
  explicit MatrixError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model fitting did not converge or could not be set up.
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

// A combinatorial guard tripped (e.g. C^B too large for exact enumeration).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Every remaining pool candidate has conditional variance at or below jitter.
class DegeneratePoolError : public std::runtime_error {
 public:
  explicit DegeneratePoolError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Bad experiment configuration (unknown keys, invalid field values).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bbal

#endif  // BBAL_ERRORS_HPP
