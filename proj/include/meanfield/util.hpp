#pragma once

// Deterministic utilities: a fully specified RNG (splitmix64 + Box-Muller) so
// seeded runs are byte-identical across builds, plus small helpers.

#include <cmath>
#include <complex>
#include <cstdint>

namespace meanfield {

struct rng64 {
    std::uint64_t state;

    explicit rng64(std::uint64_t seed) : state(seed) {}

    /// Derive an independent stream for (seed, index) pairs.
    static rng64 stream(std::uint64_t seed, std::uint64_t index) {
        rng64 r(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        r.next();
        r.next();
        return r;
    }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() {  // in (0,1)
        return (next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double normal() {
        const double u = uniform01(), v = uniform01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
    }

    std::complex<double> cnormal() {
        const double u = uniform01(), v = uniform01();
        const double r = std::sqrt(-std::log(u));
        return {r * std::cos(2.0 * M_PI * v), r * std::sin(2.0 * M_PI * v)};
    }
};

}  // namespace meanfield
