#include "rtbias/error.hpp"

namespace rtbias {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArguments: return "InvalidArguments";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SeedExceedsPopulation: return "SeedExceedsPopulation";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::InvalidRates: return "InvalidRates";
    case ErrorCode::InvalidPrior: return "InvalidPrior";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::NonContiguousTime: return "NonContiguousTime";
    case ErrorCode::NegativeCount: return "NegativeCount";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArguments: return 2;
    case ErrorCode::ParseError: return 3;
    case ErrorCode::ValidationError: return 4;
    case ErrorCode::IoError: return 5;
    case ErrorCode::NegativeMass: return 10;
    case ErrorCode::NotNormalized: return 11;
    case ErrorCode::EmptySupport: return 12;
    case ErrorCode::DimensionMismatch: return 13;
    case ErrorCode::InvalidConfig: return 20;
    case ErrorCode::SeedExceedsPopulation: return 21;
    case ErrorCode::EmptyOverlap: return 30;
    case ErrorCode::InvalidRates: return 40;
    case ErrorCode::InvalidPrior: return 41;
    case ErrorCode::EmptySamples: return 42;
    case ErrorCode::NonContiguousTime: return 50;
    case ErrorCode::NegativeCount: return 51;
  }
  return 1;
}

}  // namespace rtbias
