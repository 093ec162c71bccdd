#include "vulnaudit/error.hpp"

namespace vulnaudit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ScoreUndefined: return "score-undefined";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::Parse: return "parse-error";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::UnknownLabel: return "unknown-label";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Io: return "io-error";
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::IncompleteReview: return "incomplete-review";
  }
  return "error";
}

std::string Error::format(ErrorCode code, const std::string& message,
                          std::optional<std::size_t> line) {
  std::string out = to_string(code);
  if (line) {
    out += " (line " + std::to_string(*line) + ")";
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace vulnaudit
