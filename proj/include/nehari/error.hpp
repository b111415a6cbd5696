#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold (wrong p/q
// combination, mismatched grids, non-positive t, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A value left the domain where the formula is defined or finite.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative method failed (bracket expansion, non-convergence, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

// A field fed to a singular integrand has a nonpositive node.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A problem hypothesis is violated; `hypothesis()` names it, e.g. "(P)".
class ValidationError : public Error {
 public:
  ValidationError(std::string hypothesis, const std::string& what)
      : Error(hypothesis + " violated: " + what), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

// Malformed configuration text; `line()` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Output could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nehari
