#pragma once

#include <cstdint>
#include <random>

namespace reduxion {

// splitmix64 finalizer applied to master + golden-ratio * (index + 1).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

// Seeded stream with a platform-independent uniform draw; std::uniform_real_distribution
// is implementation-defined, so it is not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace reduxion
