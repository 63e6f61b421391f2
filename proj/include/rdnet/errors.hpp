#pragma once

#include <stdexcept>
#include <string>

namespace rdnet {

// Base of every error thrown by the library. The CLI maps the subclasses onto
// its exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Cycles, dangling vertices, unreachable sinks, inconsistent layerings.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Missing columns, malformed samples, wrong dtypes.
class DataError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdnet
