#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bulksurf {

enum class ErrorCode {
  DimensionMismatch,
  NotPositiveDefinite,
  ShiftNotBelowSpectrum,
  NoRootInBracket,
  PositivityViolated,
  BracketFailure,
  AssertionBreach,
  ResonantBoundary,
  NegativeInput,
  GridMismatch,
  SingularMode,
  PotentialTooLarge,
  SurfaceOperatorSingular,
  MeshQualityFailure,
  InvalidArgument,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ShiftNotBelowSpectrum: return "ShiftNotBelowSpectrum";
    case ErrorCode::NoRootInBracket: return "NoRootInBracket";
    case ErrorCode::PositivityViolated: return "PositivityViolated";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::AssertionBreach: return "AssertionBreach";
    case ErrorCode::ResonantBoundary: return "ResonantBoundary";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SingularMode: return "SingularMode";
    case ErrorCode::PotentialTooLarge: return "PotentialTooLarge";
    case ErrorCode::SurfaceOperatorSingular: return "SurfaceOperatorSingular";
    case ErrorCode::MeshQualityFailure: return "MeshQualityFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace bulksurf
