#include "pose_eval/error.hpp"

namespace pose_eval {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InconsistentDimension: return "InconsistentDimension";
    case ErrorCode::DuplicateSegment: return "DuplicateSegment";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoHandComponent: return "NoHandComponent";
    case ErrorCode::InvalidFps: return "InvalidFps";
    case ErrorCode::DegenerateSkeleton: return "DegenerateSkeleton";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::IncompatibleSelections: return "IncompatibleSelections";
    case ErrorCode::SourceMismatch: return "SourceMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::NoRelevant: return "NoRelevant";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::EmptyJoin: return "EmptyJoin";
    case ErrorCode::InsufficientRaters: return "InsufficientRaters";
    case ErrorCode::NoRepeats: return "NoRepeats";
    case ErrorCode::EmptyAxis: return "EmptyAxis";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) noexcept {
  return code == ErrorCode::EmptyAxis || code == ErrorCode::ParseError ||
         code == ErrorCode::InvalidConfig;
}

}  // namespace pose_eval
