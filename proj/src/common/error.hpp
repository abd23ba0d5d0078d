#pragma once

#include <stdexcept>
#include <string>

namespace rlf {

enum class ErrorCode {
  kSchema,
  kMissingViewport,
  kDuplicateXPath,
  kUnknownXPath,
  kUnsampledWidth,
  kDimensionMismatch,
  kEmptyCandidateSet,
  kCaptureUnavailable,
  kNavigationFailure,
  kIo,
  kInvalidArgument,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the core carries one of the codes above so the C
// API can map it onto a stable status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rlf
