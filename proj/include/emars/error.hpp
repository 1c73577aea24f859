#pragma once

#include <stdexcept>
#include <string>

namespace emars {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by datatype relations and functions on operands outside their
// signature: cross-datatype arguments, unit or globe mismatch, EMPTY operands
// where a value is required.
class DatatypeError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

// Snapshot header or record that cannot be read back.
class FormatError : public StoreError {
 public:
  using StoreError::StoreError;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        bare_message_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& bare_message() const { return bare_message_; }

 private:
  int line_;
  int column_;
  std::string bare_message_;
};

// Ill-formed ontology: bad characterization, safety violation, unresolvable
// function reference.
class CompileError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace emars
