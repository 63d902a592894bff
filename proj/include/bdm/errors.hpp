#pragma once

#include <stdexcept>
#include <string>

namespace bdm {

/// Caller passed parameters outside an operation's domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// q is a prime power p^k with k > 1; only prime fields are supported.
class NonPrimeFieldError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Exhaustive enumeration or state census would exceed its configured cap.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A BdmState violates d + T + sum(b) = 0 or lies outside the slot ranges.
class MalformedState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input text that does not follow a documented format.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The census does not contain every predecessor needed for a certified result.
class IncompleteCensus : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Backward reconstruction failed to reach s_0 within its step cap.
class Unreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bdm
