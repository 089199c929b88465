#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpmem {

/// Failure categories raised by the library. The CLI maps numerical
/// categories to exit status 2 and usage categories to exit status 1.
enum class ErrorCode {
  InvalidArgument,
  NonpositiveRealPart,
  QuadratureDivergence,
  EmptySignal,
  SymmetryViolation,
  NonconvergentSum,
  TruncationBeyondHorizon,
  SlowDecay,
  KernelZero,
  BranchViolation,
  NearPole,
  CFLViolation,
  UnstableStep,
  ZeroResponse,
  BranchMismatch,
  NewtonDivergence,
  WrongHalfPlane,
  K0Violation,
  InsufficientHorizon,
  Overflow,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of the numerics (as opposed to bad input or I/O).
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gpmem
