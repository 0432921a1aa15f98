#include "occm/error.hpp"

namespace occm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MassOverflow: return "MassOverflow";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularKernel: return "SingularKernel";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::EmptyAdmissibleSet: return "EmptyAdmissibleSet";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

}  // namespace occm
