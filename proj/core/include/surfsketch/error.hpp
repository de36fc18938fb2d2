#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surfsketch {

enum class ErrorCode {
  kArgument,
  kConstruction,
  kPathNotFound,
  kDegenerateStroke,
  kStrokePaint,
  kInsufficientData,
  kEmptyReport,
  kParse,
  kValidation,
  kUnknownVersion,
  kNotFound,
  kModeMismatch,
  kInvalidTransition,
  kInvalidState,
  kSessionClosed,
  kIo,
};

// Stable, snake_case names used on the wire and in CLI diagnostics.
std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace surfsketch
