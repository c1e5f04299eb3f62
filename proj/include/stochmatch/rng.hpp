#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stochmatch {

// SplitMix64 finalizer. Used to derive independent stream seeds from
// (master seed, stream id) pairs so that every trial owns its own generator
// regardless of which worker executes it.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t sub) {
  return derive_seed(derive_seed(seed, stream), sub);
}

// FNV-1a; stable across platforms, used for stream labels and config hashes.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Seeded random stream. Only the raw mt19937_64 output is used; the
// conversions below are written out so results are bit-identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) {
    return Rng(derive_seed(seed, id));
  }
  static Rng stream(std::uint64_t seed, std::uint64_t id, std::uint64_t sub) {
    return Rng(derive_seed(seed, id, sub));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // True with probability p. p >= 1 is always true, p <= 0 never.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <class Container>
  void shuffle(Container& c) {
    for (std::size_t i = c.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(c[i - 1], c[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Stream ids for the pipeline stages; kept in one place so that seeds for
// different stages never collide.
namespace streams {
inline constexpr std::uint64_t kEstimateX = fnv1a("estimate-x");
inline constexpr std::uint64_t kEstimateY = fnv1a("estimate-y");
inline constexpr std::uint64_t kEstimateQ = fnv1a("estimate-q");
inline constexpr std::uint64_t kPairAlive = fnv1a("pair-alive");
inline constexpr std::uint64_t kConditional = fnv1a("conditional");
inline constexpr std::uint64_t kPlan = fnv1a("plan");
inline constexpr std::uint64_t kRealization = fnv1a("realization");
inline constexpr std::uint64_t kVb = fnv1a("vb");
inline constexpr std::uint64_t kRun = fnv1a("run");
inline constexpr std::uint64_t kCheck = fnv1a("check");
}  // namespace streams

}  // namespace stochmatch
