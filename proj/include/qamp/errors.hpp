#pragma once

#include <stdexcept>
#include <string>

namespace qamp {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter violates its domain (angle range, probability, reflectivity...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// tau_H or tau_V is undefined because x_+ or y_+ vanishes.
class DegenerateFilter : public Error {
 public:
  using Error::Error;
};

// The heralded output carries no single-photon component, so no qubit
// fidelity can be assigned.
class EmptyQubitSubspace : public Error {
 public:
  using Error::Error;
};

// No device setting reaches unit (average) fidelity at the requested gain.
class UnreachableUnitFidelity : public Error {
 public:
  using Error::Error;
};

}  // namespace qamp
