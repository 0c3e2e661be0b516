#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace admmq {

/// Counter-based 64-bit generator.
///
/// Output k of stream `seed` is splitmix64(seed + (k + 1) * golden), so any
/// draw can be reproduced from (seed, k) without replaying the stream.
/// Normal variates use the Box-Muller transform and consume two uniforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Derive an independent stream seed for sub-task `index` of `seed`.
  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix(mix(seed ^ 0x6A09E667F3BCC909ULL) + mix(index + 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix(seed_ + counter_ * kGolden);
  }

  /// Uniform in (0, 1); never returns 0 so log() is safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace admmq
