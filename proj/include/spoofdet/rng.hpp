#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace spoofdet {

// All randomness in the toolkit flows from one top-level seed, expanded into
// per-stage streams with splitmix64 so that no stage perturbs another.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(base ^ splitmix64(salt));
}

inline std::uint64_t mix_seed(std::uint64_t base, std::string_view tag,
                              std::uint64_t salt = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(mix_seed(base, h) ^ splitmix64(salt + 1));
}

using Rng = std::mt19937_64;

// Uniform draws built directly on the engine's standardized bit stream.
// The std distributions are implementation-defined, which would break
// cross-platform reproducibility of seeds.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline double gaussian(Rng& rng) {
    // Box-Muller on the deterministic uniform; one value per call keeps the
    // stream layout simple.
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    while (u1 <= 1e-300) u1 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    // Fisher-Yates; std::shuffle is implementation-defined.
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace spoofdet
