#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gib {

enum class ErrorKind {
  NonPositiveDefinite,
  DegenerateMode,
  NumericalFailure,
  OutOfRange,
  DivergentInformation,
  RootNotFound,
  Unreachable,
  ConvergenceFailure,
  DimensionMismatch,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorKind::DegenerateMode: return "DegenerateMode";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DivergentInformation: return "DivergentInformation";
    case ErrorKind::RootNotFound: return "RootNotFound";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

/// A number as it should read in a diagnostic.
inline std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace gib
