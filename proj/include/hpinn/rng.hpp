#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hpinn {

/// Seedable generator used everywhere randomness enters the pipeline.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Real variates are built from the top 53 bits of each draw, so a
/// given seed produces the same doubles on every conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 11) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Independent child seed; used to split one stream into per-component streams.
    std::uint64_t fork_seed() { return next(); }

private:
    std::mt19937_64 engine_;
};

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a(std::string_view text);

}  // namespace hpinn
