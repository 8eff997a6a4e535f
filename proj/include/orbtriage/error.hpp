#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orbtriage {

// Bad inputs: malformed records, inconsistent metadata, invalid configs.
// The CLI maps these to exit code 1; anything else is a runtime error (2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Validation failure tied to a specific line of a JSONL stream.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, std::size_t line)
      : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + message
                                 : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace orbtriage
