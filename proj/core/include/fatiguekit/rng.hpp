#pragma once

#include <cmath>
#include <cstdint>

namespace fatiguekit {

/// Deterministic generator used by all synthetic-data code. splitmix64 with a
/// Box-Muller normal on top; unlike std::normal_distribution the byte stream
/// is identical on every platform, which the dataset generators rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1]; never zero, so it is always safe under log().
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal. Each call consumes exactly two uniforms (Box-Muller,
  /// cosine branch only) so streams stay reproducible regardless of caller
  /// interleaving.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Per-subject stream derivation: seed XOR subject index, mixed by the
  /// generator itself on first use.
  static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return seed ^ index;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fatiguekit
