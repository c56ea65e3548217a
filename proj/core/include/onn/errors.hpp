#pragma once

#include <stdexcept>
#include <string>

namespace onn {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched grid dimensions between operands.
struct ShapeError : Error {
  using Error::Error;
};

/// Invalid configuration value, unknown key, or inconsistent preset.
struct ConfigError : Error {
  using Error::Error;
};

/// Malformed, truncated, or version-mismatched file contents.
struct FormatError : Error {
  using Error::Error;
};

/// Detector disks that overlap or do not fit inside the frame.
struct GeometryError : Error {
  using Error::Error;
};

}  // namespace onn
