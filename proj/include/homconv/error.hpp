#pragma once

#include <stdexcept>
#include <string>

namespace homconv {

/// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported input data (CSV/ARFF contents, shapes).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Dataset retrieval failure (HTTP status, cache I/O).
class FetchError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace homconv
