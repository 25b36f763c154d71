#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace lpv {

// splitmix64 finalizer; the workhorse behind all seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a child seed from a parent seed and a chain of integer labels.
// Counter-based: independent of evaluation order, safe for parallel use.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64(seed ^ 0x5bf03635ad2dcbecULL);
    for (std::uint64_t p : parts)
        h = splitmix64(h ^ (p + 0x165667b19e3779f9ULL));
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) { return derive_seed(seed, {a}); }
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(seed, {a, b});
}
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return derive_seed(seed, {a, b, c});
}

// Map a u64 to a double in [0,1). 53 mantissa bits.
inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Stateless counter-based normal pair: draw j of stream `key` yields the
// two Box-Muller branches. Pure function of (key, j), so any element of a
// noise tensor is randomly accessible.
inline void counter_normal_pair(std::uint64_t key, std::uint64_t j, double& z0, double& z1) {
    std::uint64_t a = splitmix64(key ^ (2 * j + 0x9e3779b97f4a7c15ULL));
    std::uint64_t b = splitmix64(key ^ (2 * j + 1 + 0xc2b2ae3d27d4eb4fULL));
    double u1 = u64_to_unit(a);
    double u2 = u64_to_unit(b);
    if (u1 <= 0.0) u1 = 0x1.0p-53; // guard log(0)
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 6.283185307179586477 * u2;
    z0 = r * std::cos(th);
    z1 = r * std::sin(th);
}

// Element i of the Gaussian stream `key`.
inline double counter_normal(std::uint64_t key, std::uint64_t i) {
    double z0, z1;
    counter_normal_pair(key, i >> 1, z0, z1);
    return (i & 1) ? z1 : z0;
}

// Small sequential PRNG for simulation-side choices (perturbations,
// palettes, shuffles). Seeded from derive_seed so streams never collide.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x8e9c349b5fd3a1e7ULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return u64_to_unit(next_u64()); }
    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // integer in [0,n)
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Fisher-Yates over [0,n); deterministic for a fixed seed.
    template <typename Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace lpv
