#include "locpipe/util/error.h"

namespace locpipe {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedCameraModel: return "UnsupportedCameraModel";
    case ErrorCode::kUnknownImage: return "UnknownImage";
    case ErrorCode::kCheiralityViolation: return "CheiralityViolation";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteDescriptor: return "NonFiniteDescriptor";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kMissingFeatures: return "MissingFeatures";
    case ErrorCode::kMissingTimestamps: return "MissingTimestamps";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kNoValidObservation: return "NoValidObservation";
    case ErrorCode::kTooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::kNoPose: return "NoPose";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kAllInvalid: return "AllInvalid";
    case ErrorCode::kDegenerateCloud: return "DegenerateCloud";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kInfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::kNameMismatch: return "NameMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      message_(message) {}

void ThrowError(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace locpipe
