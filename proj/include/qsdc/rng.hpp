// Deterministic seedable random number generation for reproducible experiments.
#pragma once

#include <cstdint>
#include <string_view>

namespace qsdc {

// splitmix64 (Vigna / Steele et al.), chosen for bit-reproducible streams
// across platforms. Every stochastic operation in the simulator draws from
// an explicit Rng handle, and transcripts record the algorithm name.
class Rng {
public:
    static constexpr std::string_view algorithm_name = "splitmix64";

    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 significant bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    int next_bit() { return static_cast<int>(next_u64() >> 63); }

    bool bernoulli(double p) { return next_double() < p; }

    // Counter-style seed derivation: child streams for (experiment point,
    // trial) pairs never collide with the parent stream.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t z = mix(seed + 0x9e3779b97f4a7c15ULL * (a + 1));
        return mix(z + 0x9e3779b97f4a7c15ULL * (b + 1));
    }

    Rng split(std::uint64_t key) const { return Rng(derive(state_, key)); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace qsdc
