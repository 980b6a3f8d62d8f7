// Engine-wide error type. Every failure that is not ordinary control flow
// (a rule not matching, a unit failing) is reported as an Error with a code.
#pragma once

#include <stdexcept>
#include <string>

namespace hengine {

enum class ErrorCode {
  // model layer
  UnknownClass,
  AmbiguousClass,
  UnknownObject,
  UnknownAttribute,
  UnknownReference,
  TypeMismatch,
  DanglingViolation,
  MultiplicityViolation,
  NoSuchLink,
  StaleSavepoint,
  // expression layer
  SyntaxError,
  UnboundName,
  EvalTypeError,
  DivisionByZero,
  // rules and units
  UnknownParameter,
  ParameterDirection,
  ParameterTypeMismatch,
  MaxStepsExceeded,
  // text front end
  ResolutionError,
  ConformanceError,
  UnknownUnit,
  IoError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, int line = 0, int column = 0)
      : std::runtime_error(std::move(message)), code_(code), line_(line), column_(column) {}

  ErrorCode code() const { return code_; }
  // 1-based position for parse errors; 0 when not applicable.
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorCode code_;
  int line_;
  int column_;
};

}  // namespace hengine
