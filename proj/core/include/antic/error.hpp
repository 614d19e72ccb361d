#pragma once

#include <stdexcept>
#include <string>

namespace antic {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument passed to an evaluation routine (negative radius,
/// non-finite input, weight outside its declared bounds, ...).
struct InputError : Error {
  using Error::Error;
};

/// Query outside the supported range of a tabulated object.
struct ExtrapolationError : InputError {
  using InputError::InputError;
};

/// State outside the domain of the requested chart (e.g. polar with r <= 0).
struct DomainError : InputError {
  using InputError::InputError;
};

/// A precondition on the caller's data was violated.
struct ContractError : Error {
  using Error::Error;
};

/// A specification produced non-finite values during an audit.
struct SpecError : Error {
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// A regression/fit could not be performed on the given series.
struct FitError : Error {
  using Error::Error;
};

/// Non-finite value produced during numerical evaluation. Carries the index
/// of the offending agent/particle when known (-1 otherwise).
struct NumericalError : Error {
  explicit NumericalError(const std::string& what, int index = -1)
      : Error(what), index(index) {}
  int index;
};

}  // namespace antic
