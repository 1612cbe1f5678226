#pragma once

#include <stdexcept>
#include <string>

namespace ame {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rays in a bundle are (numerically) parallel; no unique closest point.
class DegenerateBundle : public Error {
 public:
  using Error::Error;
};

class NoIntersection : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class EmptySpot : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ame
