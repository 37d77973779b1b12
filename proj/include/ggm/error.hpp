#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ggm {

enum class ErrorKind {
  invalid_parameter,
  invalid_argument,
  generation_failed,
  synthesis_failed,
  numeric_failure,
  not_positive_definite,
  conditioning_failure,
  estimation_failure,
  lbp_breakdown,
  io_error,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::generation_failed: return "generation-failed";
    case ErrorKind::synthesis_failed: return "synthesis-failed";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::not_positive_definite: return "not-positive-definite";
    case ErrorKind::conditioning_failure: return "conditioning-failure";
    case ErrorKind::estimation_failure: return "estimation-failure";
    case ErrorKind::lbp_breakdown: return "lbp-breakdown";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the harness in particular) can record it per trial and move on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ggm
