#include "sprawl/error.hpp"

namespace sprawl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedShapeType: return "UnsupportedShapeType";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::BadFieldType: return "BadFieldType";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::MissingKeyColumn: return "MissingKeyColumn";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::NonContinuousAttribute: return "NonContinuousAttribute";
    case ErrorCode::SchemeTableMismatch: return "SchemeTableMismatch";
    case ErrorCode::InvalidBinning: return "InvalidBinning";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidSupport: return "InvalidSupport";
    case ErrorCode::InvalidConfidence: return "InvalidConfidence";
    case ErrorCode::MissingSubsetSupport: return "MissingSubsetSupport";
    case ErrorCode::NoContinuousPredictors: return "NoContinuousPredictors";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptBundle: return "CorruptBundle";
    case ErrorCode::NoModel: return "NoModel";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::UnknownYear: return "UnknownYear";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace sprawl
