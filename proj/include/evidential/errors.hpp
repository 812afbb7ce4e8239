#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evidential {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad sets, unknown labels, bad parameters.
class InputError : public Error {
public:
  using Error::Error;
};

// The numbers themselves are unusable: masses that do not sum to one,
// combinations with no surviving mass.
class NumericalError : public Error {
public:
  using Error::Error;
};

class EmptyFocalSet : public InputError {
public:
  EmptyFocalSet() : InputError("empty set cannot carry mass") {}
};

class OutOfFrame : public InputError {
public:
  using InputError::InputError;
};

class FrameMismatch : public InputError {
public:
  FrameMismatch() : InputError("operands are defined over different frames") {}
};

class InvalidParameter : public InputError {
public:
  using InputError::InputError;
};

class UnknownElement : public InputError {
public:
  using InputError::InputError;
};

/// Syntax error in a text document; line and column are 1-based.
class ParseError : public InputError {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : InputError("line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class MassNotNormalized : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class TotalConflict : public NumericalError {
public:
  TotalConflict() : NumericalError("total conflict: all intersections are empty") {}
};

}  // namespace evidential
