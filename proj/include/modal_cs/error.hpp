#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace modal_cs {

enum class ErrorKind {
  kInvalidArgument,
  kDomainError,
  kNotSymmetric,
  kNonPositiveEigenvalue,
  kDegenerateSpectrum,
  kShapeError,
  kDimensionMismatch,
  kNonUniformInput,
  kNonUniformSchedule,
  kInsufficientPeaks,
  kNoConvergence,
  kNumericFailure,
  kParseError,
  kRaggedRows,
  kConfigError,
  kIoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDomainError: return "DomainError";
    case ErrorKind::kNotSymmetric: return "NotSymmetric";
    case ErrorKind::kNonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorKind::kDegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::kShapeError: return "ShapeError";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonUniformInput: return "NonUniformInput";
    case ErrorKind::kNonUniformSchedule: return "NonUniformSchedule";
    case ErrorKind::kInsufficientPeaks: return "InsufficientPeaks";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kNumericFailure: return "NumericFailure";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kRaggedRows: return "RaggedRows";
    case ErrorKind::kConfigError: return "ConfigError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries an ErrorKind so callers
/// (and the CLI exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(ErrorKind::kParseError,
              "line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace modal_cs
