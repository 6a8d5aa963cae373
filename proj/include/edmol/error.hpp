#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edmol {

// Base of every error raised by the library. CLI maps these to exit code 2,
// except InternalError which maps to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. `offset` is a character offset (SMILES) or a
// record / token index, depending on the producer.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at " + std::to_string(offset) + ")"), message_(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }
  // what() without the offset suffix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t offset_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedTokenError : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

// Non-finite values reaching a numeric routine.
class NumericError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace edmol
