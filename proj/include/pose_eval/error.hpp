#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pose_eval {

enum class ErrorCode {
  // input errors
  MalformedFile,
  DimensionMismatch,
  NonFiniteValue,
  IoFailure,
  InconsistentDimension,
  DuplicateSegment,
  // data-dependent failures raised by operations
  UnknownComponent,
  IndexOutOfRange,
  NoHandComponent,
  InvalidFps,
  DegenerateSkeleton,
  ShapeMismatch,
  EmptySequence,
  IncompatibleSelections,
  SourceMismatch,
  ZeroVector,
  EmptyBatch,
  NoRelevant,
  LengthMismatch,
  DegenerateVariance,
  EmptyJoin,
  InsufficientRaters,
  NoRepeats,
  // configuration errors
  EmptyAxis,
  ParseError,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that stem from a bad run configuration rather than bad data.
bool is_config_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pose_eval
