#ifndef PLACEMETRICS_RANDOM_HPP
#define PLACEMETRICS_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>

/**
 * @file random.hpp
 *
 * Seed derivation and the handful of draws the toolkit needs.
 *
 * Every stochastic task (a tree, a k-means restart, a bootstrap iteration)
 * gets its own engine seeded by `derive_seed(master, stream, index)`, so the
 * result of a task never depends on which thread ran it or in which order.
 * The draw helpers below avoid the standard distributions, whose output is
 * implementation-defined, so reports stay byte-identical across toolchains.
 */

namespace placemetrics::rng {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based child seed: distinct (stream, index) pairs give independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) noexcept {
    return mix64(mix64(mix64(master) ^ (stream * 0xd1342543de82ef95ULL)) + index);
}

/// Named streams so that unrelated tasks never share seeds.
namespace stream {
inline constexpr std::uint64_t kTree = 1;
inline constexpr std::uint64_t kPermutation = 2;
inline constexpr std::uint64_t kFolds = 3;
inline constexpr std::uint64_t kKmeansRestart = 4;
inline constexpr std::uint64_t kGapReference = 5;
inline constexpr std::uint64_t kBootstrap = 6;
inline constexpr std::uint64_t kSimulation = 7;
inline constexpr std::uint64_t kReconstruct = 8;
inline constexpr std::uint64_t kCalibration = 9;
} // namespace stream

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t bound) {
    // 2^64 mod bound; engine() covers the full 64-bit range.
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t draw = engine();
    while (draw < threshold) {
        draw = engine();
    }
    return draw % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Engine& engine, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(engine);
}

/// Standard normal via Box-Muller (one variate per call).
inline double standard_normal(Engine& engine) {
    double u1 = uniform_unit(engine);
    while (u1 <= 0.0) {
        u1 = uniform_unit(engine);
    }
    const double u2 = uniform_unit(engine);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void shuffle(std::span<T> values, Engine& engine) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(engine, i));
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace placemetrics::rng

#endif
