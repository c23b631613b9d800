#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace groundmap {

/// splitmix64 finalizer; used to derive independent per-task seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(a) ^ b);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b) ^ c);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

/// Triangular distribution on [lo, hi] with mode at lo + (hi-lo)*mode_frac,
/// sampled by CDF inversion.
inline double sample_triangular(std::mt19937_64& rng, double lo, double hi, double mode_frac) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    const double c = mode_frac;
    if (u < c)
        return lo + (hi - lo) * std::sqrt(u * c);
    return hi - (hi - lo) * std::sqrt((1.0 - u) * (1.0 - c));
}

} // namespace groundmap
