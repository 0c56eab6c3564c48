#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace raradapt {

// SplitMix64 (Steele, Lea & Flood 2014; Vigna's fixed-increment variant).
// Chosen over std::mt19937_64 because every draw path below is fully
// specified here, so results are reproducible independent of the standard
// library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// One round of the splitmix finalizer, used to mix key material.
inline std::uint64_t mix_key(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix_key(a ^ (mix_key(b) + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

// Stream purposes. Keeping the tags explicit makes the seeding scheme part of
// the reproducibility contract: stream(seed, replicate, tag) never depends on
// how many draws another stream consumed.
enum class StreamKind : std::uint64_t {
  Trial = 0x74726961,      // allocations + outcomes for one replicate
  Auxiliary = 0x61757869,  // auxiliary-design draws
  Generic = 0x67656e65,
};

// A deterministic random stream keyed by (seed, replicate, kind).
// Replicates own independent streams, so parallel execution order cannot
// change any draw.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : gen_(key) {}

  static RngStream keyed(std::uint64_t seed, std::uint64_t replicate, StreamKind kind) {
    return RngStream(hash_combine(hash_combine(seed, replicate),
                                  static_cast<std::uint64_t>(kind)));
  }

  std::uint64_t next_u64() { return gen_.next(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection keeps it exactly uniform.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_.next();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via inverse CDF; one uniform per deviate.
  double normal();

  // Index into a probability vector; probabilities must be nonnegative and
  // sum to ~1 (validated by the caller). Falls through to the last entry so
  // rounding at the top of the CDF cannot yield an out-of-range index.
  std::size_t categorical(std::span<const double> probs) {
    double u = uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  SplitMix64 gen_;
};

}  // namespace raradapt
