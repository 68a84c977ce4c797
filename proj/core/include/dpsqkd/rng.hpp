// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace dpsqkd {

/// Deterministic 64-bit generator (splitmix64). The standard-library
/// distributions are implementation-defined, so all sampling here is
/// hand-rolled on top of this generator to keep artifacts bit-identical
/// across toolchains and worker counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bit() { return (next_u64() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

/// Finalizer-style 64-bit mix, used to derive independent streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream `index` derived from a master seed. Streams are stable under
/// any partitioning of work across threads.
inline Rng derived_rng(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(mix64(master_seed + 0x9E3779B97F4A7C15ULL * (index + 1)));
}

}  // namespace dpsqkd
