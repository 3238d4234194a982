#pragma once

#include <stdexcept>
#include <string>

namespace memochaos {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The moment system blew up (non-finite value or magnitude above the
/// divergence bound). Carries the time at which the failure was detected.
class DivergenceError : public Error {
 public:
  DivergenceError(double tau, const std::string& what)
      : Error(what), tau_(tau) {}

  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

/// An analysis window (after discarding the transient) contains no samples.
class EmptyWindow : public Error {
 public:
  using Error::Error;
};

/// A series is too short for the requested estimator.
class TooShort : public Error {
 public:
  using Error::Error;
};

/// No admissible neighbour could be found in a reconstructed attractor.
class NoNeighbor : public Error {
 public:
  using Error::Error;
};

/// A checkpoint was written for a different grid or analysis configuration.
class HashMismatch : public Error {
 public:
  using Error::Error;
};

/// A checkpoint file could not be parsed or is internally inconsistent.
class CorruptCheckpoint : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace memochaos
