#include "flexbeam/errors.hpp"

namespace flexbeam {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::MalformedSpec: return "MalformedSpec";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::MismatchedJets: return "MismatchedJets";
    case ErrorCode::NonPositiveBase: return "NonPositiveBase";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::UnknownSpec: return "UnknownSpec";
    case ErrorCode::JetTooShort: return "JetTooShort";
    case ErrorCode::MissingDerivatives: return "MissingDerivatives";
    case ErrorCode::IncompatibleInitialData: return "IncompatibleInitialData";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

}  // namespace flexbeam
