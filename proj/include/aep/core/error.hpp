#pragma once

#include <stdexcept>
#include <string>

namespace aep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTree : public Error {
 public:
  using Error::Error;
};

class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class EnumerationLimit : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aep
