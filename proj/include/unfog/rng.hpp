#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace unfog {

// Seeded random streams with platform-independent output. mt19937_64 has a
// fully specified output sequence; the distribution helpers below avoid
// std::uniform_*_distribution, whose results vary between standard libraries.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent engine from a base seed and a key path,
/// e.g. seeded_rng(seed, {kStreamWaypoint, player_index}).
inline std::mt19937_64 seeded_rng(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t s = mix64(seed);
    for (std::uint64_t k : keys) s = mix64(s ^ mix64(k));
    return std::mt19937_64(s);
}

/// FNV-1a 64-bit hash; used for string stream keys and artifact stamps.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 14695981039346656037ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::initializer_list<std::string_view> keys) {
    std::uint64_t s = mix64(seed);
    for (std::string_view k : keys) s = mix64(s ^ mix64(fnv1a64(k)));
    return std::mt19937_64(s);
}

/// Uniform double in [lo, hi).
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

/// Uniform integer in [lo, hi] via rejection sampling.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
}

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace unfog
