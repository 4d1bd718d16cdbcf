#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace honeygen {

enum class ErrorCode {
  kInvalidArgument,
  kUnknownTokenType,
  kInvalidTriple,
  kNotRobotsTxt,
  kInsufficientSamples,
  kZeroStd,
  kOutOfRange,
  kUnknownRun,
  kMissingComponent,
  kMissingColumn,
  kUnreadableFile,
  kIoFailure,
  kInsufficientCompleteRecords,
  kTooFewDecoys,
  kEmptyTraining,
  kInvalidRating,
  kNoScoredRuns,
  kFixtureMissing,
  kParseError,
  kConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownTokenType: return "UnknownTokenType";
    case ErrorCode::kInvalidTriple: return "InvalidTriple";
    case ErrorCode::kNotRobotsTxt: return "NotRobotsTxt";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kZeroStd: return "ZeroStd";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kUnknownRun: return "UnknownRun";
    case ErrorCode::kMissingComponent: return "MissingComponent";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kUnreadableFile: return "UnreadableFile";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInsufficientCompleteRecords: return "InsufficientCompleteRecords";
    case ErrorCode::kTooFewDecoys: return "TooFewDecoys";
    case ErrorCode::kEmptyTraining: return "EmptyTraining";
    case ErrorCode::kInvalidRating: return "InvalidRating";
    case ErrorCode::kNoScoredRuns: return "NoScoredRuns";
    case ErrorCode::kFixtureMissing: return "FixtureMissing";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Every library failure is reported through this one exception type; the
// code is what callers (and the CLI exit-code mapping) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace honeygen
