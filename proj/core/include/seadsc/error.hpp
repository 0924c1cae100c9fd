#pragma once

#include <stdexcept>
#include <string>

namespace seadsc {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value (sizes, thresholds, cluster counts).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operands whose dimensions do not line up (patchify, grids, losses).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent runtime data (absent code maps, empty inputs).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (bad header, truncated payload, unsupported variant).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid file carrying impossible values (index out of range).
class CorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace seadsc
