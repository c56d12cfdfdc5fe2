#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace sounder::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer: full-avalanche 64-bit mix
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// counter-based stream: the i-th 64-bit word of the stream for `seed`.
// Any index can be computed independently, so per-sample noise generation
// parallelizes without changing the drawn values.
inline std::uint64_t bits_at(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGolden);
}

// uniform in (0, 1]; never 0 so log() is safe
inline double unit_open(std::uint64_t b) {
    return static_cast<double>((b >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller pair: independent standard normals in re and im.
inline std::complex<double> gaussian_pair(std::uint64_t seed, std::uint64_t index) {
    const double u1 = unit_open(bits_at(seed, 2 * index));
    const double u2 = unit_open(bits_at(seed, 2 * index + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

// stable per-work-item seed from (master, point index, trial index);
// results are independent of execution order and parallelism degree
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial) {
    std::uint64_t s = mix64(master ^ 0xA5C152E9D10B32F7ull);
    s = mix64(s + (point + 1) * kGolden);
    s = mix64(s + (trial + 1) * kGolden);
    return s;
}

} // namespace sounder::rng
