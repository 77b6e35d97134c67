#pragma once

#include <stdexcept>
#include <string>

namespace btsbm {

// Base of every exception thrown by the library. The CLI maps the concrete
// type to its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (bad argument, unknown node code, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (model files, edge lists, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

// An iterative or factorization routine did not reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double best_residual = 0.0)
      : Error(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace btsbm
