#pragma once

#include <stdexcept>
#include <string>

namespace bouncer {

enum class ErrorKind {
  OutOfDomain,
  DomainTruncation,
  SolverConsistency,
  UnsupportedIndex,
  InfiniteAttenuation,
  InconsistentData,
  TotalAbsorption,
  Arity,
  UnfittableData,
  InvalidArgument,
  Parse,
  Validation,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfDomain: return "out_of_domain";
    case ErrorKind::DomainTruncation: return "domain_truncation";
    case ErrorKind::SolverConsistency: return "solver_consistency";
    case ErrorKind::UnsupportedIndex: return "unsupported_index";
    case ErrorKind::InfiniteAttenuation: return "infinite_attenuation";
    case ErrorKind::InconsistentData: return "inconsistent_data";
    case ErrorKind::TotalAbsorption: return "total_absorption";
    case ErrorKind::Arity: return "arity";
    case ErrorKind::UnfittableData: return "unfittable_data";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// 2 for configuration/data problems, 3 for numerical failures.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::Io:
    case ErrorKind::InvalidArgument:
      return 2;
    default:
      return 3;
  }
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace bouncer
