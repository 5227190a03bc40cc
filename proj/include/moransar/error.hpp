#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace moransar {

enum class ErrorCode {
  // input errors
  NonPositiveValue,
  ZeroVariance,
  ZeroDistance,
  AsymmetricInput,
  DegenerateMatrix,
  DimensionMismatch,
  ParseError,
  DuplicateId,
  IdMismatch,
  MissingPair,
  NonSquare,
  MissingCriticalValues,
  InvalidArgument,
  // numerical failures
  DegenerateRegression,
  DegenerateLag,
  ZeroMoran,
  ZeroRSquared,
  NotSymmetric,
  NoConvergence,
  SingularResolvent,
  DegenerateZeroField,
  IdentityViolation,
  // i/o
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ZeroDistance: return "ZeroDistance";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::MissingCriticalValues: return "MissingCriticalValues";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateRegression: return "DegenerateRegression";
    case ErrorCode::DegenerateLag: return "DegenerateLag";
    case ErrorCode::ZeroMoran: return "ZeroMoran";
    case ErrorCode::ZeroRSquared: return "ZeroRSquared";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::DegenerateZeroField: return "DegenerateZeroField";
    case ErrorCode::IdentityViolation: return "IdentityViolation";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// CLI exit code for an error: 1 input, 2 numerical, 3 i/o.
constexpr int exit_code(ErrorCode code) {
  if (code == ErrorCode::IoError) return 3;
  if (code >= ErrorCode::DegenerateRegression) return 2;
  return 1;
}

/// Exception carrying a machine-readable code and, where meaningful, the
/// offending element index or (row, column) pair.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  Error(ErrorCode code, const std::string& what, std::size_t i = npos,
        std::size_t j = npos)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        detail_(what),
        where_{i, j} {}

  /// Same error with `context` prepended to the message.
  Error with_context(const std::string& context) const {
    return Error(code_, context + ": " + detail_, where_[0], where_[1]);
  }

  ErrorCode code() const noexcept { return code_; }
  std::size_t index() const noexcept { return where_[0]; }
  std::array<std::size_t, 2> location() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::array<std::size_t, 2> where_;
};

}  // namespace moransar
