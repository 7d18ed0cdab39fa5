#pragma once

#include <stdexcept>
#include <string>

namespace afmfem {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed files, bad parameters, violated preconditions.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A computation failed: solver breakdown, non-finite values, violated identities.
class NumericalError : public Error {
public:
  using Error::Error;
};

}  // namespace afmfem
