#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holepoint {

enum class ErrorCode {
  InvalidArgument,
  HoleUnresolved,
  EmptyInterior,
  NoConvergence,
  NewtonStalled,
  TooCloseToBoundary,
  DomainViolation,
  QuadratureFailure,
  GradientTooSmallOnCircle,
  UnderSampled,
  BoundaryConditionViolated,
  PairingAmbiguous,
  ZeroGradient,
  DegenerateHessian,
  NonpositiveF,
  TooCloseToHole,
  ZeroVector,
  InsufficientData,
  NoSignChange,
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this type; callers switch
// on code() rather than on a class hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace holepoint
