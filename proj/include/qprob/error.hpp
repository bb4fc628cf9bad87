#pragma once

#include <stdexcept>
#include <string>

namespace qprob {

enum class ErrorKind {
  InvalidParameter,
  Parse,
  NotApplicable,
  QuadratureFailure,
  GridTooNarrow,
  Coverage,
  CapExceeded,
  DomainTooSmall,
  Schema,
  Io,
};

const char* to_string(ErrorKind kind);

// Validation-type errors map to CLI exit code 2, numerical ones to 3.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : Error(ErrorKind::QuadratureFailure, what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace qprob
