#pragma once

#include <cstdint>
#include <random>

namespace cvnn {

/// Seeded generator with platform-independent output. The engine is the
/// standard mt19937_64 (whose sequence is fixed by the standard); all
/// transforms to floating point are done here rather than through
/// std::*_distribution, whose algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal by Box-Muller.
    double normal();

    /// Independent stream for a (seed, index) pair, e.g. per layer or per epoch.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cvnn
