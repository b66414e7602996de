#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace atlas {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input, unknown format, bad CLI arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// One or more data invariants do not hold. `violations()` lists each one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Two collections that must agree on their ids do not.
class ReconciliationError : public Error {
 public:
  ReconciliationError(std::string what, std::vector<std::string> only_left,
                      std::vector<std::string> only_right);
  const std::vector<std::string>& only_left() const { return only_left_; }
  const std::vector<std::string>& only_right() const { return only_right_; }

 private:
  std::vector<std::string> only_left_;
  std::vector<std::string> only_right_;
};

/// Remote endpoint unreachable after the configured number of attempts.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Remote endpoint answered, but the payload breaks the expected protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A model response could not be parsed into the five labeled components.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::string raw_response)
      : Error(what), raw_response_(std::move(raw_response)) {}
  const std::string& raw_response() const { return raw_response_; }

 private:
  std::string raw_response_;
};

/// Replay mode found no cached response for a request.
class CacheMissError : public Error {
 public:
  using Error::Error;
};

/// Input geometry admits no meaningful affinities (e.g. all points identical).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Optimization produced a non-finite value.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace atlas
