#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "levywave/common.hpp"

namespace levywave {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64. All samplers are built on this
/// engine so streams are reproducible across compilers and standard libraries.
/// Sub-streams are derived by key mixing, one stream per
/// (module, band, replicate) as the noise samplers require.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    Rng substream(std::initializer_list<std::uint64_t> keys) const {
        std::uint64_t h = s_[0] ^ 0x2545f4914f6cdd1dull;
        for (std::uint64_t k : keys) {
            std::uint64_t mix = k;
            h ^= splitmix64(mix) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return Rng(h);
    }
    Rng substream(const std::string& name, std::uint64_t k0 = 0, std::uint64_t k1 = 0) const {
        return substream({fnv1a(name), k0, k1});
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0,1); never returns 0 or 1 exactly.
    double uniform() {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u == 0.0 ? 0x1.0p-54 : u;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Poisson by product-of-uniforms for small means, split recursion above.
    std::uint64_t poisson(double mean) {
        require(mean >= 0.0 && std::isfinite(mean), "poisson mean must be finite and >= 0");
        std::uint64_t total = 0;
        while (mean > 30.0) {
            // thin a deterministic chunk: Poisson(m) = Poisson(m/2) + Poisson(m/2)
            double half = mean / 2;
            total += poisson_small(half);
            mean -= half;
        }
        return total + poisson_small(mean);
    }

    double normal() {
        double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t poisson_small(double mean) {
        const double limit = std::exp(-mean);
        std::uint64_t n = 0;
        double prod = uniform();
        while (prod > limit) {
            ++n;
            prod *= uniform();
        }
        return n;
    }

    std::uint64_t s_[4];
};

} // namespace levywave
