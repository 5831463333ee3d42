#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace stochvote {

// Invalid argument or parameter combination.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested quantity exists mathematically but cannot be represented in
// double precision (e.g. conditioning on an event whose probability underflows).
class unrepresentable_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A run would exceed memory or size limits.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw parameter_error(message);
}

inline void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw parameter_error(std::string(name) + " must be finite");
  }
}

}  // namespace detail
}  // namespace stochvote
