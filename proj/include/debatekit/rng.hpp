#pragma once

#include <cmath>
#include <cstdint>

namespace debatekit {

/// SplitMix64 stream. std:: distributions are implementation-defined, so all
/// randomness in the project goes through this to keep runs bit-reproducible
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Box-Muller, one value per call (the pair's partner is discarded so the
    /// draw sequence stays simple to reason about).
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Derives an independent stream for (seed, index) pairs.
    static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
        Rng mix(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
        return mix.next_u64();
    }

private:
    std::uint64_t state_;
};

}  // namespace debatekit
