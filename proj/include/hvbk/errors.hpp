#pragma once

#include <stdexcept>
#include <string>

#include "hvbk/types.hpp"

namespace hvbk {

/// Base class for every error this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An input violated a stated precondition or invariant (CLI exit 2).
struct PreconditionError : Error {
  using Error::Error;
};

/// Cost guard on brute-force oracles (CLI exit 2).
struct CostGuardError : PreconditionError {
  using PreconditionError::PreconditionError;
};

/// The vorticity floor was breached: division by |omega_s| is unsafe.
/// Carries the offending grid node and the value found there (CLI exit 3).
struct SingularityError : Error {
  GridIndex location;
  double value;
  SingularityError(const std::string& msg, GridIndex loc, double val)
      : Error(msg), location(loc), value(val) {}
};

/// Overflow, non-finite values, divergent series, ... (CLI exit 4).
struct NumericalError : Error {
  using Error::Error;
};

/// A fitting procedure had too little data to work with (CLI exit 4).
struct FitError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace hvbk
