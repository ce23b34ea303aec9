#pragma once

#include <stdexcept>
#include <string>

namespace jointsub {

// Bad dimensions, malformed files and violated preconditions are reported as
// std::invalid_argument. Failures of the numerics themselves use the types below.

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Bingham rejection sampler hit its proposal cap.
class SamplerStall : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace jointsub
