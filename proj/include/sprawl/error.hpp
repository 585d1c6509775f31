#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sprawl {

// Machine-readable failure categories. The names double as the `code` field
// of HTTP error payloads, so keep them stable.
enum class ErrorCode {
  BadMagic,
  UnsupportedShapeType,
  Truncated,
  BadFieldType,
  HeaderMismatch,
  MissingKeyColumn,
  DuplicateKey,
  RaggedRow,
  UnknownAttribute,
  NonContinuousAttribute,
  SchemeTableMismatch,
  InvalidBinning,
  EmptyDataset,
  InvalidSupport,
  InvalidConfidence,
  MissingSubsetSupport,
  NoContinuousPredictors,
  InvalidParameter,
  VersionMismatch,
  CorruptBundle,
  NoModel,
  MissingLabel,
  KeyMismatch,
  InvalidQuery,
  UnknownYear,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sprawl
