#pragma once

#include <stdexcept>
#include <string>

namespace gridflex {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that is missing, unparsable, non-contiguous or too short.
class DataError : public Error {
 public:
  using Error::Error;
};

// A model-level contract was violated by a caller (unknown EV, duplicate day...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// An internal invariant failed; indicates a bug rather than bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridflex
