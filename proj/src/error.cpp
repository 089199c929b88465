#include "gpmem/error.hpp"

namespace gpmem {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonpositiveRealPart: return "NonpositiveRealPart";
    case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::NonconvergentSum: return "NonconvergentSum";
    case ErrorCode::TruncationBeyondHorizon: return "TruncationBeyondHorizon";
    case ErrorCode::SlowDecay: return "SlowDecay";
    case ErrorCode::KernelZero: return "KernelZero";
    case ErrorCode::BranchViolation: return "BranchViolation";
    case ErrorCode::NearPole: return "NearPole";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::ZeroResponse: return "ZeroResponse";
    case ErrorCode::BranchMismatch: return "BranchMismatch";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::WrongHalfPlane: return "WrongHalfPlane";
    case ErrorCode::K0Violation: return "K0Violation";
    case ErrorCode::InsufficientHorizon: return "InsufficientHorizon";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::IoError:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace gpmem
