#include "core/errors.hpp"

namespace convergema {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDomain: return "DomainError";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kFitDiverged: return "FitDiverged";
    case ErrorCode::kCoincidentCurves: return "CoincidentCurves";
    case ErrorCode::kNotDecreasing: return "NotDecreasing";
    case ErrorCode::kMissingWLevel: return "MissingWLevel";
    case ErrorCode::kMissingPLevel: return "MissingPLevel";
    case ErrorCode::kNotReached: return "NotReached";
    case ErrorCode::kUnresolvedCLevel: return "UnresolvedCLevel";
    case ErrorCode::kMissingHorizon: return "MissingHorizon";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kLevelGap: return "LevelGap";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace convergema
