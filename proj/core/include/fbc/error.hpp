#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbc {

enum class ErrorKind {
  // fading model
  NonPositiveMass,
  MassSumOutOfTolerance,
  NegativeGain,
  BadGridSpec,
  IncompleteTable,
  NonFiniteFunctional,
  // rate functionals
  NegativeArgument,
  PolicyInfeasible,
  CsitDoesNotDetermineOrder,
  RequiresPerfectCsit,
  // optimizer
  NoConvergence,
  BadWeight,
  RestrictionUnavailable,
  // geometry
  EmptyRegion,
  SliceOutOfRange,
  // gaussian oracle
  InvalidSpec,
  SingularConditioning,
  // io
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositiveMass: return "NonPositiveMass";
    case ErrorKind::MassSumOutOfTolerance: return "MassSumOutOfTolerance";
    case ErrorKind::NegativeGain: return "NegativeGain";
    case ErrorKind::BadGridSpec: return "BadGridSpec";
    case ErrorKind::IncompleteTable: return "IncompleteTable";
    case ErrorKind::NonFiniteFunctional: return "NonFiniteFunctional";
    case ErrorKind::NegativeArgument: return "NegativeArgument";
    case ErrorKind::PolicyInfeasible: return "PolicyInfeasible";
    case ErrorKind::CsitDoesNotDetermineOrder: return "CsitDoesNotDetermineOrder";
    case ErrorKind::RequiresPerfectCsit: return "RequiresPerfectCsit";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BadWeight: return "BadWeight";
    case ErrorKind::RestrictionUnavailable: return "RestrictionUnavailable";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::SliceOutOfRange: return "SliceOutOfRange";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::SingularConditioning: return "SingularConditioning";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace fbc
