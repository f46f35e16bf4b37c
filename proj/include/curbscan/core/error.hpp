#pragma once

#include <stdexcept>
#include <string>

namespace curbscan {

/// Machine-readable failure categories. Every throwing operation in the
/// library raises Error with one of these codes; tests assert on codes,
/// not message text.
enum class ErrorCode {
  // I/O and parsing
  MissingFile,
  ParseError,
  LabelOutOfRange,
  EmptyCloud,
  IoError,
  // geometry / numerics
  DegenerateGeometry,
  DegenerateAxis,
  OutOfRange,
  VerticalLine,
  // ml kit
  TooFewPoints,
  InvalidNu,
  InvalidGamma,
  InvalidParam,
  ZeroVariance,
  NonConvergence,
  // raster
  EmptyImage,
  IndexOutOfRange,
  DegenerateBox,
  // refinement
  MissingComponent,
  EmptyCoreset,
  AmbiguousQuadrant,
  EmptyResult,
  // reference geometry
  DegenerateCandidates,
  EmptyRegion,
  DegenerateFilter,
  NoIntersection,
  // quality control
  InsufficientPopulation,
  // measurement
  InsufficientSupport,
  NoSurfacePoints,
  QcNotPassed,
  // compliance
  AllInvalid,
  NoSharedFeatures,
  NoOverlap,
  // synthesis / configuration
  InvalidSpec,
  ConfigError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::DegenerateAxis: return "DegenerateAxis";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::VerticalLine: return "VerticalLine";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InvalidNu: return "InvalidNu";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::MissingComponent: return "MissingComponent";
    case ErrorCode::EmptyCoreset: return "EmptyCoreset";
    case ErrorCode::AmbiguousQuadrant: return "AmbiguousQuadrant";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::DegenerateCandidates: return "DegenerateCandidates";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::DegenerateFilter: return "DegenerateFilter";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::InsufficientPopulation: return "InsufficientPopulation";
    case ErrorCode::InsufficientSupport: return "InsufficientSupport";
    case ErrorCode::NoSurfacePoints: return "NoSurfacePoints";
    case ErrorCode::QcNotPassed: return "QcNotPassed";
    case ErrorCode::AllInvalid: return "AllInvalid";
    case ErrorCode::NoSharedFeatures: return "NoSharedFeatures";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Library-wide exception carrying an ErrorCode.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace curbscan
