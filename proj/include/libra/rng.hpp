#pragma once

#include <cmath>
#include <cstdint>

namespace libra {

// Counter-based RNG: every stream is keyed by (seed, stream_index), so
// shots and ensemble members can be generated in any order with identical
// results.  The generator is SplitMix64 over a mixed key; normal deviates
// use Box-Muller.  The algorithm is fixed for reproducibility within a
// release; streams are not guaranteed stable across releases.
class Rng {
  public:
    Rng(uint64_t seed, uint64_t stream_index) {
        state_ = mix(mix(seed) ^ mix(stream_index ^ 0x9e3779b97f4a7c15ull));
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, 1).
    double next_double() {
        return (double)(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) {
        return next_double() < p;
    }

    double next_normal(double sigma) {
        // Box-Muller; one deviate per call keeps the stream layout simple.
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        double u2 = next_double();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

  private:
    uint64_t state_;
};

}  // namespace libra
