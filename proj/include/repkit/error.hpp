#pragma once

#include <stdexcept>
#include <string>

namespace repkit {

enum class ErrorKind {
  NotSquare,
  NotHermitian,
  NotPositiveDefinite,
  Singular,
  ShapeMismatch,
  DimensionMismatch,
  InvalidStructureConstants,
  InvalidGroup,
  InvalidResolution,
  EvaluationFailure,
  KindMismatch,
  GroupMismatch,
  SpinOutOfRange,
  AlreadyIrreducible,
  NotIrreducible,
  NotUnitary,
  RuleMismatch,
  NonIntegerMultiplicity,
  InputParseError,
  InvalidArgument,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidStructureConstants: return "InvalidStructureConstants";
    case ErrorKind::InvalidGroup: return "InvalidGroup";
    case ErrorKind::InvalidResolution: return "InvalidResolution";
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::GroupMismatch: return "GroupMismatch";
    case ErrorKind::SpinOutOfRange: return "SpinOutOfRange";
    case ErrorKind::AlreadyIrreducible: return "AlreadyIrreducible";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::RuleMismatch: return "RuleMismatch";
    case ErrorKind::NonIntegerMultiplicity: return "NonIntegerMultiplicity";
    case ErrorKind::InputParseError: return "InputParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above, so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace repkit
