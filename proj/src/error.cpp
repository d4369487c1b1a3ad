#include "rangekin/error.hpp"

namespace rangekin {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroRange:
      return "ZeroRange";
    case ErrorKind::TooFewSensors:
      return "TooFewSensors";
    case ErrorKind::DegenerateGeometry:
      return "DegenerateGeometry";
    case ErrorKind::SingularGeometry:
      return "SingularGeometry";
    case ErrorKind::EmptyEnsemble:
      return "EmptyEnsemble";
    case ErrorKind::InvalidInput:
      return "InvalidInput";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

}  // namespace rangekin
