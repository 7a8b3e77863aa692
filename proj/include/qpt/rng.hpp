// Counter-based 64-bit generator (splitmix finalizer) with substreams
// derived from (seed, stream index), so per-setting draws do not depend on
// the order settings are evaluated in.
#pragma once

#include <cstdint>

namespace qpt {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
};

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64{mix64(seed ^ mix64(stream ^ 0x632BE59BD9B4E019ULL))};
}

}  // namespace qpt
