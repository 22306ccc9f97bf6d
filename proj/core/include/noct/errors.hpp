#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noct {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure; `position` is a zero-based character offset into the input.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownVariableError : public ParseError {
 public:
  using ParseError::ParseError;
};

class IndexOutOfRangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Evaluation outside the real domain: ln/sqrt of a non-positive argument,
/// division by zero, non-integer power of a non-positive base, overflow.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A variable required by evaluation is not bound in the environment.
class UnboundVariableError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant of a problem, generator set or argument is violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class AnsatzTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A numerical nullspace vector failed symbolic re-verification.
class VerificationFailedError : public Error {
 public:
  using Error::Error;
};

}  // namespace noct
