#include "vibron/errors.hpp"

namespace vibron {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnstableTrap: return "UnstableTrap";
    case ErrorCode::RadialCollapse: return "RadialCollapse";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::InvalidRadicand: return "InvalidRadicand";
    case ErrorCode::CoincidentIons: return "CoincidentIons";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::LinearRegime: return "LinearRegime";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotAtEquilibrium: return "NotAtEquilibrium";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::Undefined: return "Undefined";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::TailTooHeavy: return "TailTooHeavy";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace vibron
