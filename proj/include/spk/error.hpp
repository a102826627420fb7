#pragma once

#include <stdexcept>
#include <string>

namespace spk {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed documents, unknown vertices, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical contract did not hold (residual above tolerance, PSD failure, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace spk
