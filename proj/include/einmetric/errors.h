#pragma once

#include <stdexcept>
#include <string>

namespace einmetric {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or dimensions of the arguments disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented invariant (symmetry, positivity, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A plane (v, q) is degenerate under the metric in use.
class DegeneratePlaneError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue floor or condition-number guard tripped.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// A perturbation was used at a base point it is not tangent to.
class TangentError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity appeared during a computation.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// A file or document does not follow the expected schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace einmetric
