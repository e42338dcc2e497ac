#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qoco {

// Seeded random source. All draws go through explicit conversions so that
// a given seed produces the same stream on every platform (the standard
// distributions are implementation-defined and would break transcript
// reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Index sampled from an (unnormalized) probability array by a single
  // uniform draw and a sequential CDF walk. The walk order is fixed, so the
  // sampled index does not depend on how the array was produced.
  std::size_t sample_cdf(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double threshold = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (acc > threshold) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

// Derives independent sub-seeds (per-trial seeds, adversary draws) from a
// base seed. splitmix64 finalizer; distinct salts give distinct streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace qoco
