#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ricci_forge {

enum class ErrorCode {
  InvalidInput,
  OutOfDomain,
  AmbiguousAtBreakpoint,
  DomainMismatch,
  NonSmoothPoint,
  StepTooLarge,
  SingularMetric,
  EpsExceedsDomain,
  ValueMismatchAtJunction,
  NoAdmissibleEps,
  InfeasibleParameters,
  JunctionSignViolation,
  EpsilonTooLarge,
  NoAdmissibleLambda,
  SpliceOverflow,
  NoAdmissibleA,
  PositivityFail,
  ParityBoundViolation,
  EllTooSmall,
  IntersectionTooLarge,
  ShapeMismatch,
  NotConnected,
  HypothesisFail,
  StageFailure,
};

inline std::string_view error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::AmbiguousAtBreakpoint: return "AmbiguousAtBreakpoint";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::NonSmoothPoint: return "NonSmoothPoint";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::EpsExceedsDomain: return "EpsExceedsDomain";
    case ErrorCode::ValueMismatchAtJunction: return "ValueMismatchAtJunction";
    case ErrorCode::NoAdmissibleEps: return "NoAdmissibleEps";
    case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::JunctionSignViolation: return "JunctionSignViolation";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::NoAdmissibleLambda: return "NoAdmissibleLambda";
    case ErrorCode::SpliceOverflow: return "SpliceOverflow";
    case ErrorCode::NoAdmissibleA: return "NoAdmissibleA";
    case ErrorCode::PositivityFail: return "PositivityFail";
    case ErrorCode::ParityBoundViolation: return "ParityBoundViolation";
    case ErrorCode::EllTooSmall: return "EllTooSmall";
    case ErrorCode::IntersectionTooLarge: return "IntersectionTooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::HypothesisFail: return "HypothesisFail";
    case ErrorCode::StageFailure: return "StageFailure";
  }
  return "Unknown";
}

/** @brief Domain error carrying a machine-readable code. */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ricci_forge
