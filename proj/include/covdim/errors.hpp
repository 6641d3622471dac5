#pragma once

#include <stdexcept>
#include <string>

namespace covdim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct EmptyInputError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct NotPSDError : Error {
  using Error::Error;
};

struct SampleTooSmallError : Error {
  using Error::Error;
};

struct DegenerateVarianceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace covdim
