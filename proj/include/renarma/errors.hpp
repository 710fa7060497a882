#pragma once

#include <stdexcept>
#include <string>

namespace renarma {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a distributional requirement (negative mass, total mass
/// above one, invalid tail rate, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Lifetime support lies on a proper sublattice of the integers.
class LatticeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical stage failed (root finding, factorization, consistency check).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace renarma
