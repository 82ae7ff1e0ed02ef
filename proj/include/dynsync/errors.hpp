#pragma once

#include <stdexcept>
#include <string>

namespace dynsync {

// Shapes or indices that do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside its admissible range (tau <= 0, T < 1, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates an estimator precondition (e.g. disconnected union graph).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Dense diagnostics refuse problems above their size cap.
class UnsupportedSize : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable, unwritable or malformed data files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dynsync
