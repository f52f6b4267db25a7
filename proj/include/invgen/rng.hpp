#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace invgen {

/// SplitMix64 finaliser applied to seed + (index + 1) * golden gamma. Used to
/// derive one independent stream per trial so results do not depend on the
/// order or thread in which trials run.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// mt19937_64 seeded from mix_seed(seed, stream), with a rejection-sampled
// uniform draw so the sequence is identical across standard libraries.
class TrialRng {
public:
  TrialRng(std::uint64_t seed, std::uint64_t stream) : engine_(mix_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, bound).
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace invgen
