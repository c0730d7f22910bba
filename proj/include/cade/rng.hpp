#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace cade {

// Deterministic 64-bit generator (splitmix64) with self-contained
// distributions, so draws are identical across platforms and standard
// libraries. Each sample gets its own stream derived from
// (seed, sample_id), which makes parallel application order-independent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1) with 53 bits of precision
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo,hi); degenerate ranges return lo exactly
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0,n)
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; consumes exactly two draws per call
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = 1.0 - uniform01();  // (0,1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

// FNV-1a over the seed bytes followed by the tag bytes.
inline std::uint64_t hash_seed(std::uint64_t seed, std::string_view tag,
                               std::uint64_t extra = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint8_t byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(seed >> (8 * i)));
    for (char c : tag) mix(static_cast<std::uint8_t>(c));
    for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(extra >> (8 * i)));
    return h;
}

inline Rng derive_rng(std::uint64_t seed, std::string_view sample_id,
                      std::uint64_t extra = 0) {
    return Rng(hash_seed(seed, sample_id, extra));
}

}  // namespace cade
