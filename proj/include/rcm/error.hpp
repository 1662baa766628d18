#pragma once

#include <stdexcept>
#include <string>

namespace rcm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration (violated preconditions).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class LatticeMismatch : public Error {
 public:
  LatticeMismatch() : Error("fields live on different lattices") {}
};

// Time step above the 1/(2d) convex-update bound.
class StabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Endpoints of an edge are not joined by any positive-conductance path.
class DisconnectedError : public Error {
 public:
  using Error::Error;
};

class ScanExhaustedError : public Error {
 public:
  using Error::Error;
};

class NonConvergedError : public Error {
 public:
  NonConvergedError(const std::string& what, double residual, long iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

}  // namespace rcm
