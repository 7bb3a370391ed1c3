#pragma once

#include <stdexcept>
#include <string>

namespace exkin {

// Raised when a materialized object would exceed a caller-enforced cap
// (state enumeration, transition matrices, quadratic drift evaluation).
class ResourceLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Sampler/target combinations or run configurations that make no sense.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Explicit kinetic time stepping lost too much mass to negativity clipping.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace exkin
