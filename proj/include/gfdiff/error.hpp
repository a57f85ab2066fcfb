#pragma once

#include <stdexcept>
#include <string>

namespace gfdiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter, scenario or configuration value is outside its domain.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed to reach its declared accuracy
/// (series non-convergence, quadrature failure, truncation too coarse).
class NumericError : public Error {
public:
  using Error::Error;
};

/// A numeric limit on a sampled grid neither converged nor diverged clearly.
class InconclusiveLimit : public NumericError {
public:
  using NumericError::NumericError;
};

}  // namespace gfdiff
