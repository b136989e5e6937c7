#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rownav {

/// Seedable generator whose output is identical on every platform.
///
/// The engine is std::mt19937_64 (fully specified by the standard); the
/// distributions are implemented here because the standard library ones are
/// implementation-defined. Substreams are derived with SplitMix64 so that each
/// row (or sweep point) gets an independent, reproducible sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(splitmix64(seed)), engine_(key_) {}

  /// Independent stream for sub-task `index`.
  Rng substream(std::uint64_t index) const {
    return Rng(key_ ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (the second variate is cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.28318530717958647692;
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rownav
