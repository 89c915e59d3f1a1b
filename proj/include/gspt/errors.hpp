#pragma once

#include <stdexcept>
#include <string>

namespace gspt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite evaluation or a point outside the region where a map is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method (Newton, fixed point, root search) did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same quantity disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be nonzero (normal-form coefficient, transversality) vanishes.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not make progress.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace gspt
