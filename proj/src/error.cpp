#include "hengine/error.hpp"

namespace hengine {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownClass: return "unknown-class";
    case ErrorCode::AmbiguousClass: return "ambiguous-class";
    case ErrorCode::UnknownObject: return "unknown-object";
    case ErrorCode::UnknownAttribute: return "unknown-attribute";
    case ErrorCode::UnknownReference: return "unknown-reference";
    case ErrorCode::TypeMismatch: return "type-mismatch";
    case ErrorCode::DanglingViolation: return "dangling-violation";
    case ErrorCode::MultiplicityViolation: return "multiplicity-violation";
    case ErrorCode::NoSuchLink: return "no-such-link";
    case ErrorCode::StaleSavepoint: return "stale-savepoint";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::UnboundName: return "unbound-name";
    case ErrorCode::EvalTypeError: return "eval-type-error";
    case ErrorCode::DivisionByZero: return "division-by-zero";
    case ErrorCode::UnknownParameter: return "unknown-parameter";
    case ErrorCode::ParameterDirection: return "parameter-direction";
    case ErrorCode::ParameterTypeMismatch: return "parameter-type-mismatch";
    case ErrorCode::MaxStepsExceeded: return "max-steps-exceeded";
    case ErrorCode::ResolutionError: return "resolution-error";
    case ErrorCode::ConformanceError: return "conformance-error";
    case ErrorCode::UnknownUnit: return "unknown-unit";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace hengine
