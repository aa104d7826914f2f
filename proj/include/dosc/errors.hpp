#pragma once

#include <stdexcept>
#include <string>

namespace dosc {

enum class ErrorKind {
  InvalidPhase,
  EmptySupport,
  ZeroForm,
  NotDType,
  ReductionFailed,
  InvalidInvariants,
  AmbiguousClassification,
  WitnessNotFound,
  InvalidScale,
  AccuracyNotReached,
  DomainError,
  GammaOutOfRange,
  InsufficientData,
  AnnulusUnreliable,
  Config,
};

const char* to_string(ErrorKind kind);

/// Base exception for the library; `kind()` selects the CLI exit code.
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
    case ErrorKind::InvalidPhase: return "InvalidPhase";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::ZeroForm: return "ZeroForm";
    case ErrorKind::NotDType: return "NotDType";
    case ErrorKind::ReductionFailed: return "ReductionFailed";
    case ErrorKind::InvalidInvariants: return "InvalidInvariants";
    case ErrorKind::AmbiguousClassification: return "AmbiguousClassification";
    case ErrorKind::WitnessNotFound: return "WitnessNotFound";
    case ErrorKind::InvalidScale: return "InvalidScale";
    case ErrorKind::AccuracyNotReached: return "AccuracyNotReached";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::AnnulusUnreliable: return "AnnulusUnreliable";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace dosc
