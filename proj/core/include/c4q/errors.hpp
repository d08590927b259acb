#pragma once

#include <stdexcept>
#include <string>

namespace c4q {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllegalMove : public Error {
 public:
  using Error::Error;
};

class NoLegalMoves : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientRuns : public Error {
 public:
  using Error::Error;
};

}  // namespace c4q
