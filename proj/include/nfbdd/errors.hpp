#pragma once

#include <stdexcept>
#include <string>

namespace nfbdd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be parsed. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Brute-force enumeration refused because the variable count is above the cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// An operation requiring a 1-complete, 0-reduced, alternating diagram got something else.
class NotNormalForm : public Error {
 public:
  using Error::Error;
};

}  // namespace nfbdd
