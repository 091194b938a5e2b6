#pragma once

#include <stdexcept>
#include <string>

namespace matsf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor extents.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input outside an operation's mathematical domain (e.g. log of a non-positive value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an API precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unusable input data: empty files, short series, unrecoverable gaps.
class InputError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

class EncodingError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace matsf
