#pragma once

#include <stdexcept>
#include <string>

namespace subsample {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input: non-finite values, bad sizes, bad flags.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Input exceeds the enumeration bound of an exact (desk-scale) routine.
class CapacityError : public InputError {
 public:
  using InputError::InputError;
};

/// A factorization found the design (or a subset of it) rank deficient
/// where full column rank is required.
class RankError : public Error {
 public:
  using Error::Error;
};

/// The requested distribution or selection has no valid support.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace subsample
