#pragma once

#include <stdexcept>
#include <string>

namespace multiac {

// Bad user-facing configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical invariant was breached at run time, e.g. a step propagator
// drifted away from unitarity or the optimizer lost monotonicity
// (CLI exit code 3).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multiac
