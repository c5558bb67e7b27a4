#pragma once

#include <stdexcept>
#include <string>

namespace pshlab {

enum class ErrorCode {
  ModelMismatch,
  BasePointMismatch,
  InvalidArgument,
  InvalidMesh,
  DegenerateShape,
  OutsideFamily,
  DegenerateLattice,
  NotHarmonic,
  NonConvergence,
  Io,
  Config,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code and the pipeline stage that raised it.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(const std::string& stage) const {
    return Error(code_, std::string(what()), stage);
  }

private:
  ErrorCode code_;
  std::string stage_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ModelMismatch: return "model_mismatch";
    case ErrorCode::BasePointMismatch: return "base_point_mismatch";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::InvalidMesh: return "invalid_mesh";
    case ErrorCode::DegenerateShape: return "degenerate_shape";
    case ErrorCode::OutsideFamily: return "outside_family";
    case ErrorCode::DegenerateLattice: return "degenerate_lattice";
    case ErrorCode::NotHarmonic: return "not_harmonic";
    case ErrorCode::NonConvergence: return "non_convergence";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

}  // namespace pshlab
