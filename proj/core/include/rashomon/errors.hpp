#pragma once

#include <stdexcept>
#include <string>

namespace rashomon {

enum class ErrorCode {
  MissingLabelColumn,
  NonBinaryLabel,
  NonFiniteValue,
  EmptyFile,
  IoError,
  DegenerateClass,
  TooFewInstances,
  TooFewPerClass,
  TrainTooSmall,
  SizeTooLarge,
  SingularCovariance,
  NonConvergence,
  DimensionMismatch,
  MemberMismatch,
  LengthMismatch,
  BadJ,
  TooFewModels,
  SizeMismatch,
  ConstantInput,
  TooShort,
  OutOfRange,
  DegenerateR,
  TooManyFeatures,
  SolverSingular,
  MissingCells,
  MissingConsensus,
  AllFamiliesFailed,
  MissingRun,
  SchemaMismatch,
  ConfigError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
    case ErrorCode::NonBinaryLabel: return "NonBinaryLabel";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::TooFewPerClass: return "TooFewPerClass";
    case ErrorCode::TrainTooSmall: return "TrainTooSmall";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MemberMismatch: return "MemberMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadJ: return "BadJ";
    case ErrorCode::TooFewModels: return "TooFewModels";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateR: return "DegenerateR";
    case ErrorCode::TooManyFeatures: return "TooManyFeatures";
    case ErrorCode::SolverSingular: return "SolverSingular";
    case ErrorCode::MissingCells: return "MissingCells";
    case ErrorCode::MissingConsensus: return "MissingConsensus";
    case ErrorCode::AllFamiliesFailed: return "AllFamiliesFailed";
    case ErrorCode::MissingRun: return "MissingRun";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace rashomon
