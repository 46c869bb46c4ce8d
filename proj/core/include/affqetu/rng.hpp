#pragma once

#include <cstdint>
#include <random>

namespace aff {

/// SplitMix64 finalizer; used to derive independent child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seeded random stream. Children obtained via split(index) depend only on
/// the parent's root seed and the index, never on how many values the parent
/// has already drawn, so trajectories seeded per index are reproducible
/// regardless of evaluation order or thread count.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed)
        : root_(seed), engine_(splitmix64(seed)) {}

    RngStream split(std::uint64_t index) const {
        return RngStream(splitmix64(root_ ^ splitmix64(index + 1)));
    }

    std::uint64_t root_seed() const { return root_; }

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    double normal() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t root_;
    std::mt19937_64 engine_;
};

} // namespace aff
