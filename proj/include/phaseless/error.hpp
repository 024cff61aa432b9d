#pragma once

#include <stdexcept>
#include <string>

namespace phaseless {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration (bad N, lambda, eps, quadrature that fails validation, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Data for which phase retrieval is impossible, e.g. identically zero moduli at a wavenumber.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// An internal invariant was violated; indicates a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace phaseless
