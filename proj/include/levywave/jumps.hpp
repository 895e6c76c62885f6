#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "levywave/common.hpp"

namespace levywave {

/// Bounded space-time window [0,T] x [-R,R]^d.
struct SimWindow {
    double horizon = 1.0;  // T
    double radius = 1.0;   // R
    int dim = 1;

    SimWindow() = default;
    SimWindow(double T, double R, int d) : horizon(T), radius(R), dim(d) {
        require(T > 0.0 && R > 0.0, "window needs T > 0 and R > 0");
        require(d == 1 || d == 2, "spatial dimension must be 1 or 2");
    }

    double spatial_volume() const { return dim == 1 ? 2.0 * radius : 4.0 * radius * radius; }
    double volume() const { return horizon * spatial_volume(); }
    bool contains(double t, const std::array<double, 2>& x) const {
        if (t < 0.0 || t > horizon) return false;
        if (std::fabs(x[0]) > radius) return false;
        if (dim == 2 && std::fabs(x[1]) > radius) return false;
        return true;
    }
};

enum class JumpBand { Large, Overflow, Small };

std::string band_label(JumpBand b);

struct JumpAtom {
    double t = 0.0;
    std::array<double, 2> x{0.0, 0.0};
    double z = 0.0;

    double dist() const {
        return x[1] == 0.0 ? std::fabs(x[0]) : std::sqrt(x[0] * x[0] + x[1] * x[1]);
    }
};

/// Finite atom list of the Poisson random measure restricted to a window and
/// mark band, sorted by time, with seed provenance.
struct JumpSet {
    SimWindow window;
    JumpBand band = JumpBand::Large;
    std::uint64_t seed = 0;
    std::vector<JumpAtom> atoms;

    std::size_t size() const { return atoms.size(); }
    bool empty() const { return atoms.empty(); }
    void sort_by_time();

    /// CSV with header t,x1[,x2],z,band; one atom per row, full precision.
    void write_csv(std::ostream& os) const;
    static JumpSet read_csv(std::istream& is, const SimWindow& window, std::uint64_t seed);
};

} // namespace levywave
