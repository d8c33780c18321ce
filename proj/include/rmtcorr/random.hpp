#pragma once

#include <cstdint>
#include <random>

namespace rmtcorr {

/// Generator used by every seeded operation.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer; used to derive well-separated seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent sub-stream `stream` of the master `seed`. Streams with
/// distinct ids never share an engine state for the same seed.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

/// Stream ids, kept apart so that e.g. stock #3's noise never reuses the
/// sector-factor stream of sector #3.
namespace stream {
inline constexpr std::uint64_t kMarket = 0;
inline constexpr std::uint64_t kSectorBase = 1ULL << 20;
inline constexpr std::uint64_t kStockBase = 1ULL << 40;
inline constexpr std::uint64_t kParams = 1ULL << 50;
inline constexpr std::uint64_t kShuffleBase = 1ULL << 56;
}  // namespace stream

}  // namespace rmtcorr
