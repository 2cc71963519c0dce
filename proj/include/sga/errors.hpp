#pragma once

#include <stdexcept>
#include <string>

namespace sga {

// Base for every error raised by the library. Callers that only care about
// success/failure catch this; the subclasses let the CLI map to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class InsufficientCorrespondences : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

}  // namespace sga
