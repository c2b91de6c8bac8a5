#pragma once

#include <cstdint>
#include <random>

namespace gsa {

// Deterministic uniform source. mt19937_64 is pinned by the standard, so a
// given seed yields the same stream on every platform.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  // One generator step per call.
  double uniform01() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
};

}  // namespace gsa
