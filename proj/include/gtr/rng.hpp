#pragma once

#include <cstdint>
#include <random>

namespace gtr {

/// SplitMix64 finalizer over (seed, stream); decorrelates substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic uniform stream. mt19937_64 output is fully specified by the
/// standard and the [0,1) conversion avoids the implementation-defined
/// std::uniform_real_distribution, so identically seeded streams reproduce
/// bit-identical draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng substream(std::uint64_t master_seed, std::uint64_t stream_index) {
        return Rng(mix_seed(master_seed, stream_index));
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    double next_uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, n); rejection sampling, n >= 1.
    std::uint64_t next_below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace gtr
