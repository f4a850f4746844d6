#pragma once

#include <stdexcept>
#include <string>

namespace riskev {

/// Base for every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or degenerate input data: malformed records, unknown labels, single-class training sets.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to an external endpoint (LLM, embedder, NLI).
class EndpointError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

class HttpStatusError : public EndpointError {
 public:
  HttpStatusError(int status, const std::string& what) : EndpointError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class MalformedResponseError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

}  // namespace riskev
