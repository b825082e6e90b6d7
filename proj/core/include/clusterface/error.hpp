#pragma once

#include <stdexcept>
#include <string>

namespace clusterface {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid inputs, broken invariants, out-of-range parameters. CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or unwritable files, malformed streams at the OS level. CLI exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace clusterface
