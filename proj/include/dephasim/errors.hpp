#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dephasim {

enum class ErrorCode {
  NotHermitian,
  NotPSD,
  NonFinite,
  ConvergenceFailure,
  DimensionMismatch,
  NotQubit,
  InvalidArgument,
  NotHermitianGenerator,
  EmptySchedule,
  TimeOutOfRange,
  ZeroInitialCoherence,
  CutoffCapExceeded,
  ParseError,
  ValidationError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotQubit: return "NotQubit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitianGenerator: return "NotHermitianGenerator";
    case ErrorCode::EmptySchedule: return "EmptySchedule";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::ZeroInitialCoherence: return "ZeroInitialCoherence";
    case ErrorCode::CutoffCapExceeded: return "CutoffCapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by user input rather than numerics.
  bool is_validation() const noexcept {
    return code_ == ErrorCode::ParseError || code_ == ErrorCode::ValidationError ||
           code_ == ErrorCode::IoError;
  }

 private:
  ErrorCode code_;
};

/// Configuration problem tied to a named field, e.g. "time.steps".
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& reason)
      : Error(ErrorCode::ValidationError, field + ": " + reason), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& reason)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + reason),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dephasim
