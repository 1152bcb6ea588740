#pragma once

#include <stdexcept>
#include <string>

namespace moralnet {

// Base for every error the library raises on bad input or failed computation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Unreadable or unwritable path.
class IoError : public Error {
 public:
  using Error::Error;
};

// A precondition on arguments or configuration does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace moralnet
