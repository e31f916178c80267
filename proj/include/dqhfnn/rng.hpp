#pragma once

#include <cstdint>

namespace dqhfnn {

// Deterministic PRNG with portable output. std::uniform_real_distribution is
// implementation-defined, so uniform doubles are derived from raw 64-bit
// words directly; results are identical on every platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(splitmix64(seed)) {
        if (state_ == 0) {
            state_ = 0x9e3779b97f4a7c15ULL;
        }
    }

    uint64_t next_u64() {
        // xorshift64* generator
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dULL;
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        // rejection sampling to avoid modulo bias
        const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
        uint64_t v = next_u64();
        while (v >= limit) {
            v = next_u64();
        }
        return v % n;
    }

    /// Independent substream for a worker or sample index. Two substreams of
    /// the same root seed never share state, so parallel sampling loops can
    /// give each iteration its own generator and stay order-independent.
    static Rng substream(uint64_t seed, uint64_t index) {
        return Rng(substream_seed(seed, index));
    }

    /// The derived seed behind substream(), for APIs that take a raw seed.
    static uint64_t substream_seed(uint64_t seed, uint64_t index) {
        return splitmix64(seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1);
    }

    static uint64_t splitmix64(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

  private:
    uint64_t state_;
};

} // namespace dqhfnn
