#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lakelet {

enum class ErrorCode {
  kAccessDenied,
  kStorageFull,
  kNotFound,
  kDuplicateEntry,
  kUnknownEntity,
  kCycleDetected,
  kNegativeInterval,
  kIoFailure,
  kBindFailure,
  kInvalidPrincipal,
  kExpired,
  kBadSignature,
  kInvalidSpec,
  kUnknownJob,
  kIllegalState,
  kEmptyTable,
  kAllConstant,
  kDimensionMismatch,
  kKTooLarge,
  kClusterTooSmall,
  kSingleClass,
  kEmptyHoldout,
  kModelNotCertified,
  kNoCandidates,
  kInvalidArgument,
  kParseError,
};

std::string_view to_string(ErrorCode code);

// Every domain failure in the lake surfaces as an Error carrying its code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace lakelet
