#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rpwy {

/// Input that violates a documented precondition (bad model, bad grid, bad flag value).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical invariant was broken during a computation (non-finite state, trace drift,
/// a density matrix that is not positive semidefinite).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed tabular input. Carries the 1-based line number of the offending record.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rpwy
