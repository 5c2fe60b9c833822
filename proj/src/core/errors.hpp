#pragma once

#include <stdexcept>
#include <string>

namespace convergema {

// Mirrors cvg_status in the public C header; keep the numbering in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDomain = 2,
  kDegenerateData = 3,
  kFitDiverged = 4,
  kCoincidentCurves = 5,
  kNotDecreasing = 6,
  kMissingWLevel = 7,
  kMissingPLevel = 8,
  kNotReached = 9,
  kUnresolvedCLevel = 10,
  kMissingHorizon = 11,
  kParse = 12,
  kIo = 13,
  kLevelGap = 14,
  kInternal = 15,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace convergema
