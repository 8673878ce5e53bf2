#ifndef LOCPIPE_UTIL_ERROR_H_
#define LOCPIPE_UTIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace locpipe {

enum class ErrorCode {
  kIo,
  kParseError,
  kUnsupportedCameraModel,
  kUnknownImage,
  kCheiralityViolation,
  kImageTooSmall,
  kDimensionMismatch,
  kNoConvergence,
  kBadMagic,
  kTruncatedFile,
  kNonFiniteDescriptor,
  kEmptyIndex,
  kZeroVector,
  kMissingFeatures,
  kMissingTimestamps,
  kDegenerateGeometry,
  kNoValidObservation,
  kTooFewCorrespondences,
  kNoPose,
  kShapeMismatch,
  kAllInvalid,
  kDegenerateCloud,
  kDiverged,
  kInfeasibleSpec,
  kNameMismatch,
  kInvalidArgument,
};

const char* ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  // The message without the code prefix that what() carries.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] void ThrowError(ErrorCode code, const std::string& message);

}  // namespace locpipe

#endif  // LOCPIPE_UTIL_ERROR_H_
