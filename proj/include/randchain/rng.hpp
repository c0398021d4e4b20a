#pragma once

/**
 * Rng — seedable, platform-identical PRNG for every stochastic operation
 * in this library.
 *
 * The engine is splitmix64 (Steele, Lea & Flood; public-domain reference
 * by Vigna). It was chosen over <random> engines+distributions because the
 * standard distributions are implementation-defined: two standard libraries
 * may emit different streams for the same seed. Everything here is specified
 * down to the bit, so a (seed, call sequence) pair reproduces exactly on any
 * conforming platform.
 *
 * Derived streams: derive(seed, a, b, ...) hashes the path elements into a
 * fresh engine state, so parallel tasks can get independent, reproducible
 * streams from one master seed.
 */

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace randchain {

inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Seed for an independent (seed, path...) stream. Each path element is
    // mixed through splitmix64 so derive(s, {1, 2}) != derive(s, {2, 1}).
    static uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path) {
        uint64_t s = seed;
        for (uint64_t p : path) {
            uint64_t t = s ^ (p + 0x9E3779B97F4A7C15ULL);
            s = splitmix64_next(t);
        }
        return s;
    }

    static Rng derive(uint64_t seed, std::initializer_list<uint64_t> path) {
        return Rng(derive_seed(seed, path));
    }

    uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound), unbiased via rejection. bound >= 1.
    uint64_t next_below(uint64_t bound) {
        const uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Standard normal, Box-Muller (one variate per pair of uniforms).
    double normal() {
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Gamma(shape, 1), Marsaglia-Tsang squeeze method.
    double gamma(double shape) {
        if (shape < 1.0) {
            // Boost to shape+1 and scale back.
            double u = 1.0 - next_double();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = 1.0 - next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Beta(a, b) via the gamma ratio.
    double beta(double a, double b) {
        double x = gamma(a);
        double y = gamma(b);
        return x / (x + y);
    }

private:
    uint64_t state_;
};

}  // namespace randchain
