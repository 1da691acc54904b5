#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace secref {

// Hard errors. Contract failures at the boundary are values (see contract.hpp),
// everything listed here aborts the current run.
enum class ErrorCode {
  TypeMismatch,
  Uncontained,
  PreorderViolation,
  DanglingInit,
  ShareLeak,
  AlreadyLabeled,
  MonotonicRefShare,
  LabelMapAccess,
  RecallUnwitnessed,
  WitnessFalse,
  StabilityViolation,
  InvariantViolation,
  OutOfFuel,
  BoundaryViolation,
  ParseError,
  TypeError,
  InterfaceMismatch,
  GenerationExhausted,
};

std::string_view to_string(ErrorCode code);

class SecrefError : public std::runtime_error {
 public:
  SecrefError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw SecrefError(code, message);
}

}  // namespace secref
