#include "psloc/errors.hpp"

namespace psloc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DegenerateGeometry: return "degenerate geometry";
    case ErrorCode::NonSmoothModel: return "non-smooth model";
    case ErrorCode::ZeroInformation: return "zero information";
    case ErrorCode::UnboundedIntensity: return "unbounded intensity";
    case ErrorCode::OutOfRegion: return "out of region";
    case ErrorCode::SingularDesign: return "singular design";
    case ErrorCode::DegenerateInformation: return "degenerate information";
    case ErrorCode::OptimizerFailure: return "optimizer failure";
    case ErrorCode::Underflow: return "underflow";
    case ErrorCode::InsufficientScales: return "insufficient scales";
    case ErrorCode::SingularTarget: return "singular target";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

}  // namespace psloc
