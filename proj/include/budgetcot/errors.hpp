#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace budgetcot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or incomplete harness configuration (missing pricing, unset env var, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated on an analysis input (empty trace, k too large, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Network failure that survived every retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// HTTP 429 on every attempt.
class RateLimitError : public Error {
 public:
  using Error::Error;
};

/// The provider answered, but not with something we can read.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string raw_body)
      : Error(what), raw_body_(std::move(raw_body)) {}
  const std::string& raw_body() const noexcept { return raw_body_; }

 private:
  std::string raw_body_;
};

class EstimationParseError : public Error {
 public:
  explicit EstimationParseError(std::string raw_response)
      : Error("no integer in budget estimation response"),
        raw_response_(std::move(raw_response)) {}
  const std::string& raw_response() const noexcept { return raw_response_; }

 private:
  std::string raw_response_;
};

/// Dataset or corpus file that does not parse. `line` is 1-based, 0 if unknown.
class DatasetError : public Error {
 public:
  DatasetError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace budgetcot
