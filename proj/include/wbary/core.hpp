#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wbary {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

enum class ErrorCode {
  NegativeWeight,
  NotNormalized,
  DegenerateDensity,
  AllZeroImage,
  NonPositiveGamma,
  DimensionMismatch,
  NoConvergence,
  InvalidParameter,
  MissingNeighborMessage,
  DimensionTooLarge,
  NonPositiveParameter,
  NTooSmall,
  TopologyViolation,
  DegenerateReference,
  BadMagic,
  TruncatedFile,
  OutOfCanvas,
  NonRectangularGrid,
  IoError,
  ConfigError,
};

inline const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DegenerateDensity: return "DegenerateDensity";
    case ErrorCode::AllZeroImage: return "AllZeroImage";
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::MissingNeighborMessage: return "MissingNeighborMessage";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::NTooSmall: return "NTooSmall";
    case ErrorCode::TopologyViolation: return "TopologyViolation";
    case ErrorCode::DegenerateReference: return "DegenerateReference";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::OutOfCanvas: return "OutOfCanvas";
    case ErrorCode::NonRectangularGrid: return "NonRectangularGrid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

}  // namespace wbary
