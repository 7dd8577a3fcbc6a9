#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vibron {

/// Failure categories raised by the numerical modules.
enum class ErrorCode {
  UnstableTrap,
  RadialCollapse,
  InvalidCount,
  InvalidRadicand,
  CoincidentIons,
  NotStationary,
  LinearRegime,
  NoConvergence,
  NotAtEquilibrium,
  Unstable,
  NoBracket,
  DimensionMismatch,
  TruncationTooSmall,
  GridTooCoarse,
  IndexOutOfRange,
  Undefined,
  Degenerate,
  NoRoot,
  TailTooHeavy,
  StepRejected,
  NonHermitian,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Numerical or physical failure. The CLI maps these to exit code 3.
class PhysicsError : public std::runtime_error {
 public:
  PhysicsError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vibron
