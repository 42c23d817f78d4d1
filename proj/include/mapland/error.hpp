#pragma once

#include <stdexcept>
#include <string>

namespace mapland {

// Base of every error the library throws. The CLI maps the subclasses onto
// distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or cardinality mismatch, non-square matrix, bad dimension index.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A count that does not fit in 64 bits.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (search order, dimension subset, start strategy...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or corrupt instance / graph file, or an OS-level IO
// failure.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A configured enumeration or exploration cap would be exceeded.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// Input that is structurally valid but violates a value invariant, e.g. a
// column that is not a permutation.
class ValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace mapland
