// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hbf {

enum class ErrorCode {
  kSingularGram,
  kNotHermitian,
  kDimensionMismatch,
  kSingularFim,
  kDegenerateBound,
  kTooFewPilots,
  kInfeasibleGrid,
  kZeroBb,
  kBoundViolation,
  kInvalidArgument,
  kConfigError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularGram: return "SingularGram";
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularFim: return "SingularFim";
    case ErrorCode::kDegenerateBound: return "DegenerateBound";
    case ErrorCode::kTooFewPilots: return "TooFewPilots";
    case ErrorCode::kInfeasibleGrid: return "InfeasibleGrid";
    case ErrorCode::kZeroBb: return "ZeroBb";
    case ErrorCode::kBoundViolation: return "BoundViolation";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace hbf
