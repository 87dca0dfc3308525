#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace peerrank {

// Base of every error raised by the library. The CLI maps IoError and
// TransportError to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input references unknown models, has missing entries, or mismatched sizes.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A malformed record in a line-delimited file.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A record violates a domain constraint, e.g. a judge reviewing its own battle.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Zero variance or otherwise undefined statistic.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InvalidVerdictError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace peerrank
