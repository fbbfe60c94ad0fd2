#pragma once

#include <stdexcept>
#include <string>

namespace wuuct {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidAction : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller (e.g. stepping a
// terminal state).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Internal statistics bookkeeping went wrong (e.g. O underflow). Aborts runs.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class DuplicateAction : public Error {
 public:
  using Error::Error;
};

class WidthCapExceeded : public Error {
 public:
  using Error::Error;
};

class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

class SerializationError : public Error {
 public:
  using Error::Error;
};

// A worker failed or a queue was closed underneath the master.
class TransportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wuuct
