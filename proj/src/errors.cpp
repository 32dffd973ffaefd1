#include "relfuse/errors.hpp"

namespace relfuse {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCycleDetected: return "CYCLE_DETECTED";
    case ErrorCode::kMultipleRoots: return "MULTIPLE_ROOTS";
    case ErrorCode::kDanglingParent: return "DANGLING_PARENT";
    case ErrorCode::kRootHasNoParent: return "ROOT_HAS_NO_PARENT";
    case ErrorCode::kZeroDuration: return "ZERO_DURATION";
    case ErrorCode::kAnchorNotFinite: return "ANCHOR_NOT_FINITE";
    case ErrorCode::kZeroTotalWeight: return "ZERO_TOTAL_WEIGHT";
    case ErrorCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::kSupportMismatch: return "SUPPORT_MISMATCH";
    case ErrorCode::kNotPositiveDefinite: return "NOT_POSITIVE_DEFINITE";
    case ErrorCode::kProblemTooLarge: return "PROBLEM_TOO_LARGE";
    case ErrorCode::kInvalidInput: return "INVALID_INPUT";
    case ErrorCode::kIoFailure: return "IO_FAILURE";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace relfuse
