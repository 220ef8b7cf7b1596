#pragma once

#include <stdexcept>
#include <string>

namespace polystar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (negative density, non-positive mass, kappa <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model or run configuration is inconsistent or unsupported.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A precondition relating several inputs does not hold (mismatched
/// masses, incompatible grids).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical procedure failed (quadrature divergence, root
/// bracket lost, NaN in an evolution).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Shooting never reached z = 0: the equation of state does not produce a
/// compactly supported star.
class InfiniteRadiusError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The mass scan over central values never bracketed the requested mass.
class MassUnreachableError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace polystar
