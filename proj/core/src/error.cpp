#include "knotenergy/error.hpp"

namespace knotenergy {

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NumericFailure:
    case ErrorCode::StepTooLarge:
    case ErrorCode::Stagnation:
    case ErrorCode::FlowAbort:
      return false;
    default:
      return true;
  }
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::DiagonalSingularity: return "diagonal-singularity";
    case ErrorCode::TailDivergence: return "tail-divergence";
    case ErrorCode::MissingDerivative: return "missing-derivative";
    case ErrorCode::InsufficientGrid: return "insufficient-grid";
    case ErrorCode::Pole: return "pole";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Format: return "format";
    case ErrorCode::NumericFailure: return "numeric-failure";
    case ErrorCode::StepTooLarge: return "step-too-large";
    case ErrorCode::Stagnation: return "stagnation";
    case ErrorCode::FlowAbort: return "flow-abort";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace knotenergy
