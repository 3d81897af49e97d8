#pragma once

#include <stdexcept>
#include <string>

namespace wio {

/// Invalid parameter or argument (maps to a usage failure in the CLI).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed mini-language or config input.
class ParseError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Non-finite value, overflow, or an iteration that failed to converge.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A requested integral does not converge (exponent at or below 1).
class DivergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Mismatched dimensions between blocks, grids, or samples.
class StructuralError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A sweep plan that cannot be executed as written (node budget, schedule).
class PlanError : public DomainError {
public:
  using DomainError::DomainError;
};

class IllConditionedError : public NumericalError {
public:
  IllConditionedError(const std::string& what, double estimate)
      : NumericalError(what), estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

private:
  double estimate_;
};

}  // namespace wio
