#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace rcm {

/// splitmix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the stream owned by trial `trial` of a batch seeded with `seed`.
/// Depends only on (seed, trial), so trial sets are order-independent.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632BE59BD9B4E019ULL));
}

/// Seeded generator with platform-stable bounded draws.
///
/// std::uniform_int_distribution is implementation-defined, so bounded
/// integers are drawn by rejection on the raw 64-bit engine output instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rcm
