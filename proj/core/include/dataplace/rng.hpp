#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace dataplace {

// splitmix64 finalizer; used to derive independent substream seeds from a
// base seed. Stream s of base seed b is seeded with mix_seed(b, s).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seedable random source with platform-independent draws. The engine
// (mt19937_64) is pinned by the standard; the sampling helpers below avoid
// standard-library distribution objects, whose output is implementation
// defined, so runs reproduce bit-for-bit for a fixed seed anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t base_seed, std::uint64_t stream_id) {
    return Rng(mix_seed(base_seed, stream_id));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., m-1}; rejection keeps it exactly uniform.
  std::uint64_t uniform_index(std::uint64_t m) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % m;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % m;
  }

  // Uniform on {lo, ..., hi} inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(
                    uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Index draw from nonnegative weights summing to ~1. Consumes one uniform.
  int sample_discrete(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t o = 0; o + 1 < probs.size(); ++o) {
      acc += probs[o];
      if (u < acc) return static_cast<int>(o);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dataplace
