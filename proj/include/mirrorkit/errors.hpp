#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mirrorkit {

enum class ErrorKind {
  ParseError,
  RankDeficient,
  ZeroColumn,
  EmptyChamber,
  DivisionByZero,
  UnknownModel,
  NotAUnit,
  MissingBundleData,
  RingMismatch,
  NoConvergence,
  DegenerateCritical,
  NoConsistentBranch,
  IncompleteCriticalSet,
  BranchEscape,
  ContourDivergence,
  QuadratureFailure,
  PoleOnContour,
  DominantCriticalAmbiguous,
  UnsupportedDimension,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::EmptyChamber: return "EmptyChamber";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::MissingBundleData: return "MissingBundleData";
    case ErrorKind::RingMismatch: return "RingMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateCritical: return "DegenerateCritical";
    case ErrorKind::NoConsistentBranch: return "NoConsistentBranch";
    case ErrorKind::IncompleteCriticalSet: return "IncompleteCriticalSet";
    case ErrorKind::BranchEscape: return "BranchEscape";
    case ErrorKind::ContourDivergence: return "ContourDivergence";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::PoleOnContour: return "PoleOnContour";
    case ErrorKind::DominantCriticalAmbiguous: return "DominantCriticalAmbiguous";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace mirrorkit
