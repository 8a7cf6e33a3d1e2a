#pragma once

#include <cstdint>
#include <random>

namespace rtbias {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for an independent sub-stream `stream` of `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  return mix64(mix64(base) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Fixed stream ids so that every component draws from its own sequence.
namespace stream {
inline constexpr std::uint64_t kTransmission = 1;
inline constexpr std::uint64_t kThinning = 2;
inline constexpr std::uint64_t kLatentCells = 3;
inline constexpr std::uint64_t kRates = 4;
inline constexpr std::uint64_t kMcmc = 5;
}  // namespace stream

}  // namespace rtbias
