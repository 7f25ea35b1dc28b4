#pragma once

#include <stdexcept>
#include <string>

namespace landmark {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input content violates its format (bad WAV header, malformed .PHN line, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument or configuration value is out of range.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace landmark
