#include "holepoint/error.hpp"

namespace holepoint {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::HoleUnresolved: return "HoleUnresolved";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NewtonStalled: return "NewtonStalled";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::GradientTooSmallOnCircle: return "GradientTooSmallOnCircle";
    case ErrorCode::UnderSampled: return "UnderSampled";
    case ErrorCode::BoundaryConditionViolated: return "BoundaryConditionViolated";
    case ErrorCode::PairingAmbiguous: return "PairingAmbiguous";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::DegenerateHessian: return "DegenerateHessian";
    case ErrorCode::NonpositiveF: return "NonpositiveF";
    case ErrorCode::TooCloseToHole: return "TooCloseToHole";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace holepoint
