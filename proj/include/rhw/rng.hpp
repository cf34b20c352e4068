#pragma once

#include <cmath>
#include <cstdint>

namespace rhw {

// SplitMix64, used to expand one master seed into independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic, platform-independent random stream (xoshiro256++).
/// The standard-library distributions are unspecified across
/// implementations, so uniform and normal draws are generated by hand.
class Rng {
public:
  Rng() : Rng(0x853c49e6748fea9bULL) {}

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  /// Stream `index` derived from a master seed; distinct indices give
  /// independent sequences.
  static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t sm = master_seed;
    std::uint64_t a = splitmix64(sm);
    std::uint64_t mix = a ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return Rng(mix);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform01_open_low() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; two uniforms per draw, no caching,
  /// so the consumption pattern is easy to reason about.
  double normal(double mean, double stddev) {
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Named substreams split from the run's master seed.
enum class RngStream : std::uint64_t {
  Arrivals = 0,  // arrival lane assignment
  Sampling = 1,  // driver parameter sampling + equipment draw
  Dawdle = 2,    // per-decision speed imperfection
};

inline Rng make_stream(std::uint64_t master_seed, RngStream which) {
  return Rng::stream(master_seed, static_cast<std::uint64_t>(which));
}

}  // namespace rhw
