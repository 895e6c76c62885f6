#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "levywave/jumps.hpp"
#include "levywave/levy_measure.hpp"

namespace levywave {

/// Space-time cells of size dt x dx^d tiling the window; the small-jump part
/// of the noise is accumulated per cell.
struct CellLattice {
    double dt = 0.0, dx = 0.0;
    int nt = 0, nx = 0, ny = 0;  // ny = 1 in d = 1

    static CellLattice from_window(const SimWindow& w, double dt, double dx);
    double cell_volume(int dim) const { return dim == 1 ? dt * dx : dt * dx * dx; }
    int cell_count() const { return nt * nx * ny; }
    std::size_t index(int kt, int ix, int iy) const {
        return (static_cast<std::size_t>(kt) * nx + ix) * ny + iy;
    }
    double t_mid(int kt) const { return (kt + 0.5) * dt; }
    double x_mid(int ix, double radius) const { return -radius + (ix + 0.5) * dx; }
};

/// Compound-Poisson approximation of the compensated small-jump integral:
/// marks with eps < |z| <= 1 summed per cell, the exact compensator rate kept
/// alongside. Jumps below eps are discarded (documented bias).
struct SmallJumpField {
    double epsilon = 1e-2;
    CellLattice lattice;
    JumpSet atoms;                  // band Small, kept for the moment checks
    std::vector<double> cell_sums;  // raw mark sums per cell
    double compensator_rate = 0.0;  // int_{eps<|z|<=1} z nu(dz), per unit volume
    std::vector<double> gaussian_correction;  // optional, empty unless enabled

    /// cell increment; compensated subtracts |cell| * compensator_rate
    double increment(int kt, int ix, int iy, bool compensated) const {
        double v = cell_sums[lattice.index(kt, ix, iy)];
        if (!gaussian_correction.empty()) v += gaussian_correction[lattice.index(kt, ix, iy)];
        if (compensated) v -= lattice.cell_volume(atoms.window.dim) * compensator_rate;
        return v;
    }
};

/// All atoms of J with |z| > 1 inside the window. Truncation levels are views
/// of this one stream: level N keeps |z| <= N h(x), the complement is the
/// level-N overflow. This is what makes tau_N monotone across N on a
/// realization.
JumpSet sample_base_large_jumps(const LevyMeasure& measure, const SimWindow& window,
                                std::uint64_t seed);

JumpSet filter_large_at_level(const JumpSet& base, const TruncationSpec& trunc);
JumpSet filter_overflow_at_level(const JumpSet& base, const TruncationSpec& trunc);

/// sample_large_jumps of the module contract: Poisson atoms with
/// 1 < |z| <= N h(x) in the window, deterministic under the seed.
JumpSet sample_large_jumps(const LevyMeasure& measure, const SimWindow& window,
                           const TruncationSpec& trunc, std::uint64_t seed);

/// Overflow atoms outside the spatial box (|z| > N h(x), x outside [-R,R]^d),
/// needed so tau_N has its whole-space law. Levels N' >= trunc.level are
/// obtained by thinning.
JumpSet sample_outside_overflow(const LevyMeasure& measure, const SimWindow& window,
                                const TruncationSpec& trunc, std::uint64_t seed);

JumpSet merge_sorted(const JumpSet& a, const JumpSet& b, JumpBand band);

SmallJumpField sample_small_jump_increments(const LevyMeasure& measure,
                                            const SimWindow& window,
                                            const CellLattice& lattice, double epsilon,
                                            std::uint64_t seed,
                                            bool gaussian_correction = false);

/// Lambda_N = int_domain nu({|z| > N h(x)}) dx. domain_radius = kInf means the
/// whole space, which requires eta * alpha > d.
double exceedance_rate(const LevyMeasure& measure, const TruncationSpec& trunc, int dim,
                       double domain_radius);

/// Earliest overflow atom time in [0,T], +inf if none.
double stopping_time(const JumpSet& overflow, double T);

struct NoiseSpec {
    LevyMeasure measure = LevyMeasure::stable(1.5, 1.0, 1.0);
    AssumptionA assumption;
    TruncationSpec trunc;
    SimWindow window;
    double epsilon = 1e-2;
    double dt = 0.0, dx = 0.0;
    bool outside_overflow = true;
    bool gaussian_correction = false;
};

/// One realization of the truncated noise L_N on the window: drift, small-jump
/// cell field, large-jump atoms, overflow atoms (for tau_N only) and the
/// stopping time. Immutable after sampling; level re-views share the base
/// streams. Decomposition mode is no-drift exactly when p < 1.
struct NoiseRealization {
    NoiseSpec spec;
    std::uint64_t seed = 0;
    bool with_drift = true;  // p >= 1 branch of the decomposition

    JumpSet base_large;  // all |z| > 1 atoms in the box
    JumpSet large;       // level-N accepted band
    JumpSet overflow;    // level-N overflow (in-box + outside), time sorted
    SmallJumpField small;
    double tau = kInf;

    double drift() const { return with_drift ? spec.assumption.drift : 0.0; }

    /// Re-thin the same realization at a higher truncation level.
    NoiseRealization at_level(int level) const;

    /// Restrict to a smaller spatial box (atoms dropped, cells re-cut).
    /// Lattice alignment requires (R_old - R_new) to be a multiple of dx.
    NoiseRealization restricted(double new_radius) const;
};

NoiseRealization sample_noise(const NoiseSpec& spec, std::uint64_t seed);

} // namespace levywave
