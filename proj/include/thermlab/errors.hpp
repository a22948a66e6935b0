#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace thermlab {

enum class ErrorCode {
  DomainError,
  ValidationError,
  NormalizationError,
  NotAState,
  InconsistentBloch,
  MapNotClosed,
  StepTooLarge,
  StepUnderflow,
  DefectiveMatrix,
  NoConvergence,
  BothZero,
};

std::string_view to_string(ErrorCode code);

// Numerical failures map to CLI exit status 3, everything else to 2.
bool is_numerical_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class ViolationKind {
  KossakowskiViolation,
  NegativeRate,
  DivergentOccupation,
  DeltaMismatch,
  NonPositiveFrequency,
  InvalidTemperature,
  OhmicMismatch,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(ViolationKind kind) const;

 private:
  std::vector<Violation> violations_;
};

}  // namespace thermlab
