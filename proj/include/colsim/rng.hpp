// rng.hpp — Counter-based seeded random stream for reproducible trajectory sampling

#pragma once

#include <cmath>
#include <cstdint>

namespace colsim {

// Stateless-mix generator: draw i of stream s under base seed b is a pure
// function of (b, s, i), so trajectories own disjoint streams and runs are
// bit-reproducible at any worker count.
class CounterRng {
public:
    CounterRng(std::uint64_t base_seed, std::uint64_t stream)
        : key_(mix(base_seed + 0x9E3779B97F4A7C15ULL * mix(stream + 1))) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    // Uniform in [0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Inverse-CDF exponential sample with the given rate.
    double next_exponential(double rate) {
        return -std::log1p(-next_uniform()) / rate;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace colsim
