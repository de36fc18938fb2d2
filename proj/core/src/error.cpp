#include "surfsketch/error.hpp"

namespace surfsketch {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kArgument: return "argument_error";
    case ErrorCode::kConstruction: return "construction_error";
    case ErrorCode::kPathNotFound: return "path_not_found";
    case ErrorCode::kDegenerateStroke: return "degenerate_stroke";
    case ErrorCode::kStrokePaint: return "stroke_paint_error";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kEmptyReport: return "empty_report";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kUnknownVersion: return "unknown_version";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kModeMismatch: return "mode_mismatch";
    case ErrorCode::kInvalidTransition: return "invalid_transition";
    case ErrorCode::kInvalidState: return "invalid_state";
    case ErrorCode::kSessionClosed: return "session_closed";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown_error";
}

}  // namespace surfsketch
