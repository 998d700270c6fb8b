// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace opcvx {

enum class ErrorKind {
  NonConvergence,
  DomainViolation,
  DimensionMismatch,
  NotHermitian,
  NotCommuting,
  ArityMismatch,
  SingularDifferential,
  NoIntegralForm,
  UnknownMap,
  UnknownCheck,
  BadParameter,
  BadInput,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::SingularDifferential: return "SingularDifferential";
    case ErrorKind::NoIntegralForm: return "NoIntegralForm";
    case ErrorKind::UnknownMap: return "UnknownMap";
    case ErrorKind::UnknownCheck: return "UnknownCheck";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::BadInput: return "BadInput";
  }
  return "Error";
}

}  // namespace opcvx
