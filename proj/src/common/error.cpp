#include "common/error.hpp"

namespace rlf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
      return "SchemaError";
    case ErrorCode::kMissingViewport:
      return "MissingViewport";
    case ErrorCode::kDuplicateXPath:
      return "DuplicateXPath";
    case ErrorCode::kUnknownXPath:
      return "UnknownXPath";
    case ErrorCode::kUnsampledWidth:
      return "UnsampledWidth";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kEmptyCandidateSet:
      return "EmptyCandidateSet";
    case ErrorCode::kCaptureUnavailable:
      return "CaptureUnavailable";
    case ErrorCode::kNavigationFailure:
      return "NavigationFailure";
    case ErrorCode::kIo:
      return "IoError";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace rlf
