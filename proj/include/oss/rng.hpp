#pragma once

#include <cstdint>

namespace oss {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-keyed uniform random stream. Streams keyed by (seed, a, b) are
/// independent of evaluation order and thread scheduling, so every consumer
/// derives its randomness from its logical index rather than from a shared
/// sequential generator.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
        std::uint64_t s = seed;
        state_ = splitmix64(s);
        s ^= 0x6a09e667f3bcc909ULL + a;
        state_ ^= splitmix64(s);
        s ^= 0xbb67ae8584caa73bULL + b;
        state_ ^= splitmix64(s);
        // warm-up round decorrelates nearby keys
        (void)next_u64();
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  private:
    std::uint64_t state_;
};

}  // namespace oss
