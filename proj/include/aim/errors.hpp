#pragma once

#include <stdexcept>
#include <string>

namespace aim {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition on a value was violated (bad radius, element count, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

// A geometric or structural constraint was violated (e.g. transmitters
// inside the receiver span).
struct ConstraintViolation : Error {
  using Error::Error;
};

// A baseline maps outside the configured u-v grid extent.
struct GridOverflow : Error {
  using Error::Error;
};

// Two grids that must match (bin size / extent / raster) do not.
struct IncompatibleGrid : Error {
  using Error::Error;
};

// Array or image dimensions do not agree.
struct DimensionMismatch : Error {
  using Error::Error;
};

// Input is degenerate for the requested statistic (empty support,
// constant image, zero-length capture, ...).
struct DegenerateInput : Error {
  using Error::Error;
};

// A receiver channel carries no usable signal; `channel` names it.
struct UnrecoverableChannel : Error {
  UnrecoverableChannel(int channel_index, const std::string& message)
      : Error(message), channel(channel_index) {}
  int channel;
};

// Experiment specification / configuration problems.
struct ConfigError : Error {
  using Error::Error;
};

// File system and format failures.
struct IoError : Error {
  using Error::Error;
};

}  // namespace aim
