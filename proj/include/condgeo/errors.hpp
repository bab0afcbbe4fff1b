#ifndef CONDGEO_ERRORS_HPP
#define CONDGEO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace condgeo {

enum class ErrorCode {
  WeightSum,
  NegativeWeight,
  DimensionMismatch,
  EmptySupport,
  LabelMismatch,
  SolverFailure,
  MaxIterExceeded,
  InstanceTooLarge,
  NonPSD,
  SingularCovariance,
  ZeroRow,
  UnknownLabel,
  OutOfRange,
  Infeasible,
  ConfigError,
  DataError,
  NumericalError,
  UnknownArtifact,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception carrying a typed error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::WeightSum: return "WeightSum";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::NonPSD: return "NonPSD";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DataError: return "DataError";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::UnknownArtifact: return "UnknownArtifact";
  }
  return "UnknownError";
}

}  // namespace condgeo

#endif  // CONDGEO_ERRORS_HPP
