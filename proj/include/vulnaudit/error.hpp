#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace vulnaudit {

enum class ErrorCode {
  ScoreUndefined,    // attribute score over zero entries
  InsufficientData,  // too few (dated) samples for the operation
  Parse,             // malformed record or document
  DuplicateId,
  UnknownLabel,
  InvalidArgument,
  Io,
  DegenerateInput,   // statistic undefined for the input (e.g. all ties)
  IncompleteReview,  // unset verdicts or missing adjudication
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(format(code, message, line)), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  /// 1-based line number for errors raised while reading line-oriented input.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            std::optional<std::size_t> line);

  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace vulnaudit
