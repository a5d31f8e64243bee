#pragma once

#include <stdexcept>
#include <string>

namespace bcd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or argument check failed.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace bcd
