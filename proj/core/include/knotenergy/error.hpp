#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knotenergy {

enum class ErrorCode {
  // Input validation failures.
  DegenerateInput,
  DimensionMismatch,
  DiagonalSingularity,
  TailDivergence,
  MissingDerivative,
  InsufficientGrid,
  Pole,
  InvalidArgument,
  Format,
  // Numeric failures during computation.
  NumericFailure,
  StepTooLarge,
  Stagnation,
  FlowAbort,
};

/// True for codes that signal bad input rather than a failed computation.
bool is_validation_error(ErrorCode code) noexcept;

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace knotenergy
