#include "qprob/error.hpp"

namespace qprob {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::GridTooNarrow: return "grid-too-narrow";
    case ErrorKind::Coverage: return "coverage-failure";
    case ErrorKind::CapExceeded: return "cap-exceeded";
    case ErrorKind::DomainTooSmall: return "domain-too-small";
    case ErrorKind::Schema: return "incompatible-schema";
    case ErrorKind::Io: return "io-error";
  }
  return "error";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::Parse:
    case ErrorKind::NotApplicable:
    case ErrorKind::CapExceeded:
    case ErrorKind::Schema:
    case ErrorKind::Io:
      return true;
    default:
      return false;
  }
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qprob
