#pragma once

#include <stdexcept>
#include <string>

namespace jhess {

/// Shape or argument errors: wrong dimensions, malformed specs, invalid weights.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside the domain of a field (or a stencil leaving it).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure: singular systems, degenerate Hessians, non-finite values,
/// non-convergent series, failed residual gates.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not available for the algebra at hand (e.g. spectral calculus on
/// raw structure constants).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace jhess
