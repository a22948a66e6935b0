#include "thermlab/errors.hpp"

#include <algorithm>

namespace thermlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NormalizationError: return "NormalizationError";
    case ErrorCode::NotAState: return "NotAState";
    case ErrorCode::InconsistentBloch: return "InconsistentBloch";
    case ErrorCode::MapNotClosed: return "MapNotClosed";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BothZero: return "BothZero";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::StepTooLarge:
    case ErrorCode::StepUnderflow:
    case ErrorCode::DefectiveMatrix:
    case ErrorCode::NoConvergence:
    case ErrorCode::MapNotClosed:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::KossakowskiViolation: return "KossakowskiViolation";
    case ViolationKind::NegativeRate: return "NegativeRate";
    case ViolationKind::DivergentOccupation: return "DivergentOccupation";
    case ViolationKind::DeltaMismatch: return "DeltaMismatch";
    case ViolationKind::NonPositiveFrequency: return "NonPositiveFrequency";
    case ViolationKind::InvalidTemperature: return "InvalidTemperature";
    case ViolationKind::OhmicMismatch: return "OhmicMismatch";
  }
  return "Unknown";
}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.kind)) + " (" + v.detail + ")";
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::ValidationError, summarize(violations)),
      violations_(std::move(violations)) {}

bool ValidationError::has(ViolationKind kind) const {
  return std::any_of(violations_.begin(), violations_.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

}  // namespace thermlab
