#pragma once

#include <stdexcept>
#include <string>

namespace flowgebd {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing, unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input that parses but violates the expected layout (dimensions, headers).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters (thresholds, grid sizes, kernel settings).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Data that breaks a domain invariant (timestamps outside a video, etc).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed JSON / CSV documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace flowgebd
