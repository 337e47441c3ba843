#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metriclass {

enum class ErrorCode {
  DivisionByZero,
  SqrtOfNegative,
  SqrtUnsupportedExact,
  NoSignChange,
  NoConvergence,
  DimensionTooSmall,
  DimensionMismatch,
  AsymmetricInput,
  SingularMatrix,
  DependentBasis,
  NotARepresentative,
  WrongSignature,
  ZeroVector,
  NotInG0,
  NotInGLambda,
  NegativeT,
  NoTableMatch,
  FrameNotPseudoOrthonormal,
  OracleMismatch,
  ParameterOutOfRange,
  EvidenceFailure,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace metriclass
