#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace levywave {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when a requested integral or rate does not converge
/// (e.g. a stable moment with exponent on the wrong side of alpha).
class divergence_error : public std::domain_error {
public:
    explicit divergence_error(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when a computation needs data outside the sampled window/levels.
class coverage_error : public std::runtime_error {
public:
    explicit coverage_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a statistical routine has too little data to say anything.
class statistics_error : public std::runtime_error {
public:
    explicit statistics_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

/// Worker count for replicate-parallel loops. LEVYWAVE_WORKERS overrides.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Results must be written to preallocated,
/// index-owned slots so the reduction order stays deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// FNV-1a, used for config hashes and seed derivation from names.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace levywave
