#pragma once

#include <stdexcept>
#include <string>

namespace mwstats {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Not enough samples or points to form an estimate.
class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A moment table lacks entries required by an operation.
class IncompleteMomentsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Formula evaluated at a pole (e.g. the straddling point of the dispersive shift).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature, inversion or fit could not produce a trustworthy number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares problem is degenerate (rank deficient design, degenerate sweep).
class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mwstats
