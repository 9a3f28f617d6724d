#pragma once

#include <stdexcept>
#include <string>

namespace flexbeam {

// Every failure mode the library reports. The CLI maps these onto its
// exit-code contract, so additions here need a mapping in tools/.
enum class ErrorCode {
  NonPositiveParameter,
  NonPositiveCoefficient,
  MalformedSpec,
  OutOfDomain,
  SolverDivergence,
  GridTooCoarse,
  IndexOutOfRange,
  BoundViolation,
  MismatchedJets,
  NonPositiveBase,
  QuadratureFailure,
  UnknownSpec,
  JetTooShort,
  MissingDerivatives,
  IncompatibleInitialData,
  NonFiniteState,
  DimensionMismatch,
  GridMismatch,
  FileNotFound,
  ParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace flexbeam
