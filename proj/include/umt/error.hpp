#pragma once

#include <stdexcept>
#include <string>

namespace umt {

// Base for every recoverable error raised by the library. The CLI maps all of
// these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(msg + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Input violates a documented precondition (non-ultra filter, unmapped
// constant, non-extensional model, ...).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& msg, std::string witness = {})
      : Error(witness.empty() ? msg : msg + ": " + witness),
        witness_(std::move(witness)) {}
  const std::string& witness() const { return witness_; }

 private:
  std::string witness_;
};

// A size guard refused to materialize an object.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace umt
