#pragma once

#include <stdexcept>
#include <string>

namespace bonefrag {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (empty input, width mismatch, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Geometry too degenerate for the requested quantity (collinear points etc.).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

// Malformed input file (PLY, CSV). Messages carry the offending location.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (JSON config, CLI flags, hyperparameters).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace bonefrag
