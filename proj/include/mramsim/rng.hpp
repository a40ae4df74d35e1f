#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mramsim {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of indices, e.g.
/// derive_seed(seed, {point, trial}). Order matters; the result depends only
/// on the inputs, so work split across threads draws identical streams.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                                  std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t p : path) {
        h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

/// One standard normal draw from a fresh engine seeded with `seed`.
[[nodiscard]] inline double standard_normal(std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(engine);
}

/// Uniform draw on [0, 1) from a fresh engine seeded with `seed`.
[[nodiscard]] inline double uniform01(std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine);
}

// Salts that keep independent draws of one trial apart.
enum class Stream : std::uint64_t {
    Resistance = 1,
    LatchOffset = 2,
    FailCoin = 3,
    Comparator = 4,
    DeviceP = 5,
    DeviceAP = 6,
};

[[nodiscard]] constexpr std::uint64_t salt(Stream s) noexcept {
    return static_cast<std::uint64_t>(s);
}

}  // namespace mramsim
