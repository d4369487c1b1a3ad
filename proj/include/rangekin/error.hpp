#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rangekin {

enum class ErrorKind {
  ZeroRange,           // target coincides with a sensor (range division by zero)
  TooFewSensors,       // position stage needs N >= 3
  DegenerateGeometry,  // trilateration design matrix is rank deficient
  SingularGeometry,    // 2x2 Gram matrix singular or above the condition cap
  EmptyEnsemble,       // no successful Monte Carlo trials to aggregate
  InvalidInput,        // malformed arguments (non-finite values, size mismatch, ...)
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying one of the named estimation failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rangekin
