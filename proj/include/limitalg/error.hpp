#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace limitalg {

enum class ErrorCode {
  InvalidInput,
  NotReflexive,
  NotTransitive,
  NotOrthogonal,
  NotInjective,
  EdgeIncompatible,
  BlockPartial,
  ImageOverlap,
  SourceTargetMismatch,
  AmbientTooSmall,
  NotMultiplicative,
  NotStarConsistent,
  NotInRange,
  ProfileMismatch,
  NotInnerEquivalent,
  TriangleNotCommuting,
  NotRegular,
  ResidualTooLarge,
  Disconnected,
  InconsistentRanks,
  CapacityExceeded,
  TooFarApart,
  CensusMismatch,
  DepthUnavailable,
  BandMismatch,
  NotTrBand,
  DimensionMismatch,
  ShapeMismatch,
  SchemaError,
  DanglingReference,
  UsageError,
};

std::string_view to_string(ErrorCode code);

// Witness indices are stored as the user sees them (1-based where they name
// diagonal indices, blocks, classes or stages).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::vector<long> witness = {},
        double residual = 0.0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        witness_(std::move(witness)),
        residual_(residual) {}

  /// An error about a named thing: a JSON pointer, a reference name.
  static Error about(ErrorCode code, std::string subject, const std::string& message) {
    Error e(code, subject + ": " + message);
    e.subject_ = std::move(subject);
    return e;
  }

  ErrorCode code() const noexcept { return code_; }
  const std::vector<long>& witness() const noexcept { return witness_; }
  double residual() const noexcept { return residual_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::vector<long> witness_;
  double residual_;
  std::string subject_;
};

}  // namespace limitalg
