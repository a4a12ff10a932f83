#pragma once

// Counter-based deterministic random entries: every sample is a pure hash of
// (seed, row point, column point), so a matrix entry does not depend on the
// window size or the order of evaluation. Enlarging the window extends the
// same Z^d operator, and runs are bit-identical across platforms (integer
// arithmetic plus one division by 2^53).

#include <complex>
#include <cstdint>

namespace carleman {

/// Identifier embedded in experiment reports.
inline constexpr const char* rng_algorithm = "splitmix64-point-hash-v1";

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t h, std::int64_t v) {
    return splitmix64(h ^ static_cast<std::uint64_t>(v) * 0xD6E8FEB86659FD93ULL);
}

inline double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53; // [0, 1)
}

/// Hash of a (seed, point pair) counter.
inline std::uint64_t point_pair_hash(std::uint64_t seed, int kx, int ky, int lx, int ly) {
    std::uint64_t h = splitmix64(seed);
    h = mix(h, kx);
    h = mix(h, ky);
    h = mix(h, lx);
    h = mix(h, ly);
    return h;
}

/// Complex sample with |u| <= 1: uniform modulus in [0,1), uniform phase.
inline std::complex<double> unit_disk(std::uint64_t h) {
    const double rho = to_unit(h);
    const double theta = 2.0 * 3.14159265358979323846 * to_unit(splitmix64(h));
    return std::polar(rho, theta);
}

} // namespace rng
} // namespace carleman
