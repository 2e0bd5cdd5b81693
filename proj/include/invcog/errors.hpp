#pragma once

#include <stdexcept>
#include <string>

namespace invcog {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model, dataset, or experiment configuration. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioned or non-convergent numerics.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Observed data is impossible under the model (zero total weight).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// Particle weights collapsed.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Input sequence violates a precondition (e.g. nonpositive values on a log scale).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace invcog

namespace invcog {

/// A game or experiment protocol cannot proceed (e.g. a zero gain to divide by).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace invcog
