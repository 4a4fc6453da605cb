#pragma once

#include <stdexcept>
#include <string>

namespace tonealloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of a function
/// (negative or non-finite power, nonpositive gain, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The local maximization has no finite solution (zero power price with an
/// unreachable SNR cap).
class UnboundedError : public Error {
 public:
  using Error::Error;
};

/// NaN, divergence, or an iteration cap hit inside a numerical routine.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario or configuration input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Instance too large for an enumeration-based routine.
class SizeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tonealloc
