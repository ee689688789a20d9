#pragma once

#include <stdexcept>
#include <string>

namespace maskrefine {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration. `field()` holds the JSON path of
/// the offending value, e.g. `classes[3].id`.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// File could not be read, written or decoded.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Rasters that must share a size do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raster content violates a precondition (void where forbidden, unknown id).
class ValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace maskrefine
