#pragma once

#include <stdexcept>
#include <string>

namespace conicwave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid inputs: bad parameters, malformed files, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to meet its tolerance or iteration budget.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A trajectory reached a cone point where the closed-form flow is undefined.
class ConePointError : public Error {
 public:
  using Error::Error;
};

}  // namespace conicwave
