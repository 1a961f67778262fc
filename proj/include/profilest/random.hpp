#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace profilest {

// SplitMix64 finalizer; derives independent stream seeds from a base seed
// and a stream id so results never depend on scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Symmetric Dirichlet(1) draw of dimension k.
  std::vector<double> dirichlet1(std::size_t k) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& x : v) {
      x = -std::log1p(-uniform());
      sum += x;
    }
    for (auto& x : v) x /= sum;
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace profilest
