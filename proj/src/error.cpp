#include "pagets/error.hpp"

namespace pagets {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparseableTimestamp: return "UnparseableTimestamp";
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::RaggedInput: return "RaggedInput";
    case ErrorCode::InvalidL: return "InvalidL";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::OutOfOrder: return "OutOfOrder";
    case ErrorCode::UnknownSeries: return "UnknownSeries";
    case ErrorCode::UntrainedModel: return "UntrainedModel";
    case ErrorCode::InvalidConfidence: return "InvalidConfidence";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DiskFull: return "DiskFull";
    case ErrorCode::CorruptManifest: return "CorruptManifest";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::DegenerateTruth: return "DegenerateTruth";
    case ErrorCode::IncompleteGrid: return "IncompleteGrid";
  }
  return "Unknown";
}

}  // namespace pagets
