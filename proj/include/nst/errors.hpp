#pragma once

#include <stdexcept>
#include <string>

namespace nst {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed or insufficient input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-convergence or non-finite numerics (exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace nst
