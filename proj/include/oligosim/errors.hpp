#pragma once

#include <stdexcept>
#include <string>

namespace oligosim {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model parameter or config value violates its invariant.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Malformed or unknown configuration entry.  The message names the key.
class ConfigError : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// A function was evaluated outside its domain (e.g. log of a zero share).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The integrator needed a simplex correction larger than allowed.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// A requested target lies outside the reachable range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A broken invariant that indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace oligosim
