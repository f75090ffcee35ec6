#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace rrl {

/// Seeded generator with platform-independent draws (the std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Index drawn from an unnormalized nonnegative weight vector.
    std::size_t categorical(std::span<const double> weights);

    /// Standard normal via Box-Muller.
    double normal();

    /// Independent child stream, deterministic in (this stream's seed, salt).
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

private:
    std::mt19937_64 engine_;
};

}  // namespace rrl
