#include "lakelet/error.hpp"

namespace lakelet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAccessDenied: return "AccessDenied";
    case ErrorCode::kStorageFull: return "StorageFull";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kDuplicateEntry: return "DuplicateEntry";
    case ErrorCode::kUnknownEntity: return "UnknownEntity";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kNegativeInterval: return "NegativeInterval";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBindFailure: return "BindFailure";
    case ErrorCode::kInvalidPrincipal: return "InvalidPrincipal";
    case ErrorCode::kExpired: return "Expired";
    case ErrorCode::kBadSignature: return "BadSignature";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kUnknownJob: return "UnknownJob";
    case ErrorCode::kIllegalState: return "IllegalState";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kAllConstant: return "AllConstant";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kClusterTooSmall: return "ClusterTooSmall";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kEmptyHoldout: return "EmptyHoldout";
    case ErrorCode::kModelNotCertified: return "ModelNotCertified";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace lakelet
