#pragma once

#include <stdexcept>
#include <string>

namespace wscl {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kZeroDegree,
  kNoConvergence,
  kNoiseRateOutOfRange,
  kNotClassBalanced,
  kConfigInvalid,
  kDiverged,
  kSamplerUnderflow,
  kThetaOutOfRange,
  kIndexOutOfRange,
  kDegenerateDenominator,
  kUndefinedThreshold,
  kEmptyKRange,
  kSingularSystem,
  kPrecondition,
  kIo,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wscl
