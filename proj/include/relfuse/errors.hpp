#pragma once

#include <stdexcept>
#include <string>

namespace relfuse {

enum class ErrorCode {
  kCycleDetected,
  kMultipleRoots,
  kDanglingParent,
  kRootHasNoParent,
  kZeroDuration,
  kAnchorNotFinite,
  kZeroTotalWeight,
  kShapeMismatch,
  kSupportMismatch,
  kNotPositiveDefinite,
  kProblemTooLarge,
  kInvalidInput,
  kIoFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Violated input contract: malformed trees, shape mismatches, bad file content.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside a solver.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace relfuse
