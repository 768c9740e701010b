#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixpl {

// Base class for every domain error raised by the library. The CLI maps all of
// these onto exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class OverlapError : public Error {
 public:
  using Error::Error;
};

class SumError : public Error {
 public:
  using Error::Error;
};

class NonPositiveError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownStructureError : public Error {
 public:
  using Error::Error;
};

class TooLargeError : public Error {
 public:
  using Error::Error;
};

class EmptyProfileError : public Error {
 public:
  using Error::Error;
};

class NoMomentDataError : public Error {
 public:
  using Error::Error;
};

class DivisionError : public Error {
 public:
  using Error::Error;
};

class DuplicateError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Raised when supplied marginals cannot come from a single coherent model.
class IncoherenceError : public Error {
 public:
  using Error::Error;
};

class NegativeResultError : public IncoherenceError {
 public:
  using IncoherenceError::IncoherenceError;
};

}  // namespace mixpl
