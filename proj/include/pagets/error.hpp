#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pagets {

enum class ErrorCode {
  // ingestion
  MissingColumn,
  UnparseableTimestamp,
  DuplicateTimestamp,
  EmptyFile,
  InvalidInterval,
  RaggedInput,
  // page matrix / svd
  InvalidL,
  OutOfRange,
  TooFewRows,
  NonFiniteInput,
  RankOutOfRange,
  EmptySpectrum,
  ShapeMismatch,
  // estimator
  LengthMismatch,
  // model / query
  InvalidParams,
  WidthMismatch,
  OutOfOrder,
  UnknownSeries,
  UntrainedModel,
  InvalidConfidence,
  // persistence
  IoError,
  DiskFull,
  CorruptManifest,
  ChecksumMismatch,
  VersionUnsupported,
  // metrics
  DegenerateTruth,
  IncompleteGrid,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library surfaces as this exception; `code()` is the
/// machine-readable discriminator, `what()` carries the human context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pagets
