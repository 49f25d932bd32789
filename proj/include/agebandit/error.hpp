#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agebandit {

enum class ErrorCode {
  kResourceCapViolation,
  kProbabilityRange,
  kZeroDimension,
  kDimensionMismatch,
  kZeroCount,
  kEmptyLog,
  kMissingMuTable,
  kIoError,
  kUnknownPolicy,
  kUnknownScenario,
  kParse,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agebandit
