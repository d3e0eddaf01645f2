#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sttcache {

// Root of every error the library throws. The CLI maps the three
// families below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or invalid arguments to an operation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class TraceError : public Error {
 public:
  enum class Kind { MalformedLine, NonMonotoneTimestamp, UnknownKind };

  TraceError(Kind kind, std::uint64_t line_no, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  std::uint64_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::uint64_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Numeric preconditions of the physical models (non-positive temperature,
// subcritical write current, time reversal in the thermal field, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace sttcache
