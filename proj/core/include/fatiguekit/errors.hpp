#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fatiguekit {

/// Bad inputs: violated invariants, malformed files, unit mismatches.
/// Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally valid input that admits no answer (e.g. a regression with
/// no informative points). Maps to CLI exit code 2.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or out-of-range configuration; the message names the key.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// File parse failure carrying file/line context.
class ParseError : public ValidationError {
 public:
  ParseError(std::string file, std::size_t line, const std::string& message)
      : ValidationError(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace fatiguekit
