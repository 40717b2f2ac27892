#pragma once

#include <stdexcept>
#include <string>

namespace plasmadiag {

// Base for every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Evaluation at a pole (1 + RCs = 0).
class SingularityError : public Error {
public:
  using Error::Error;
};

// Caller violated a structural precondition (non-uniform ladder, non-monotone curve, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

class FitError : public Error {
public:
  using Error::Error;
};

// Root bracket could not be located inside the search window.
class RangeError : public Error {
public:
  using Error::Error;
};

// Missing or malformed fields in a CSV header or JSON document.
class SchemaError : public Error {
public:
  using Error::Error;
};

// A data row that could not be parsed; carries its 1-based line number.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace plasmadiag
