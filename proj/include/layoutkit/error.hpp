#pragma once

#include <stdexcept>
#include <string>

namespace layoutkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (panel capacity, schema declaration).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported Form JSON. The message starts with the JSON path.
class FormError : public Error {
 public:
  using Error::Error;
};

/// Misuse of a builder during filling (unbalanced lists, unknown fields,
/// values that do not fit the declared type).
class BuilderError : public Error {
 public:
  using Error::Error;
};

/// A destination region is missing or smaller than the data it must hold.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Buffers that cannot be interpreted under their Form. The message names
/// the offending node.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace layoutkit
