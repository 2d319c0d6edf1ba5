#pragma once

#include <stdexcept>
#include <string>

namespace aslcheck {

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  InvalidBasis,
  NonInteriorStart,
  IterationLimit,
  Unbounded,
  CertificateFailure,
  SizeGuard,
  Parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::InvalidBasis: return "invalid basis";
    case ErrorKind::NonInteriorStart: return "non-interior start";
    case ErrorKind::IterationLimit: return "iteration limit";
    case ErrorKind::Unbounded: return "unbounded";
    case ErrorKind::CertificateFailure: return "certificate failure";
    case ErrorKind::SizeGuard: return "size guard";
    case ErrorKind::Parse: return "parse error";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace aslcheck
