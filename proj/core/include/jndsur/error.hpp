#pragma once

#include <stdexcept>
#include <string>

namespace jndsur {

/// Thrown when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a multi-stage pipeline cannot proceed (missing upstream
/// artifact, missing previous-order prediction, and so on).
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by the file readers. Carries the offending 1-based line number,
/// or 0 when the problem is not tied to a line.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) +
                           ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace jndsur
