#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rtbias {

// Every failure the library can raise. Each code maps to a distinct process
// exit status in the CLI (see exit_code()).
enum class ErrorCode {
  InvalidArguments,
  ParseError,
  ValidationError,
  IoError,
  NegativeMass,
  NotNormalized,
  EmptySupport,
  DimensionMismatch,
  InvalidConfig,
  SeedExceedsPopulation,
  EmptyOverlap,
  InvalidRates,
  InvalidPrior,
  EmptySamples,
  NonContiguousTime,
  NegativeCount,
};

std::string_view error_name(ErrorCode code) noexcept;

// Exit status used by the CLI for a given error. 0 is success, 1 is reserved
// for unexpected internal failures.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rtbias
