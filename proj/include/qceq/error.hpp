#pragma once

#include <stdexcept>
#include <string>

namespace qceq {

enum class ErrorCode {
  ArityMismatch,
  TheoryMismatch,
  UnsupportedTheory,
  DimensionCap,
  DimensionMismatch,
  NotUnitary,
  NotIsometry,
  ShapeMismatch,
  BlockNotIdentity,
  SolveFailure,
  InvalidInput,
  UnknownRule,
  BadParameters,
  StaleMatch,
  StepFailed,
  ParseError,
  WireBookkeeping,
  IO,
};

const char *error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

} // namespace qceq
