#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "levywave/common.hpp"
#include "levywave/jumps.hpp"

namespace levywave {

/// Mollified bump, the canonical C_c^infty surrogate used to localize norms:
/// phi(x) = exp(1 - 1/(1 - s^2)) for s = |x - c|/radius < 1, else 0.
struct WindowFn {
    double center1 = 0.0, center2 = 0.0;
    double radius = 1.0;

    double operator()(double x1, double x2 = 0.0) const {
        double d1 = (x1 - center1) / radius, d2 = (x2 - center2) / radius;
        double s2 = d1 * d1 + d2 * d2;
        if (s2 >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - s2));
    }
};

/// Result of a band-limited H^r norm. The norm follows the convention of the
/// fractional Sobolev space definition used throughout:
/// ||f||^2 = int |F f(xi)|^2 (1+|xi|^2)^r dxi with F f = int f e^{-i xi x} dx,
/// so the H^0 norm is 2 pi ||f||_{L2}^2 per dimension.
struct HrNormResult {
    double value_sq = 0.0;
    double band_edge = 0.0;    // pi / dx
    double tail_bound = kInf;  // analytic truncation estimate, finite for r < -1/2 (d=1), r < -1 (d=2)
    bool band_limited = false; // r >= 0: the truncation is a documented approximation
};

HrNormResult hr_norm_sq(const std::vector<double>& field, double x0, double dx, double r,
                        const std::optional<WindowFn>& window = {});

/// 2-d field, npt x npt, row-major, coordinates x0 + i dx per axis.
HrNormResult hr_norm_sq_2d(const std::vector<double>& field, int npt, double x0, double dx,
                           double r, const std::optional<WindowFn>& window = {});

/// Divergence scan for ||delta||_{H^r(R^2)}^2 = int (1+|xi|^2)^r dxi:
/// partial integrals over growing balls; converges iff the doubling
/// increments decay geometrically (true iff r < -1).
struct MembershipScan {
    double r = 0.0;
    std::vector<double> band_radii;
    std::vector<double> partial_integrals;
    std::vector<double> doubling_increments;
    double last_ratio = 0.0;
    bool converges = false;
};

MembershipScan delta_membership_scan(double r, int doublings = 12, double first_radius = 1.0);

/// ||G_{tau+h} - G_tau||_{H^r}^2 by radial quadrature of the spectral
/// increment integrand; tau = 0 gives ||G_h||^2 (the right limit at the
/// kernel's start is the zero field).
double kernel_increment_sq(int dim, double tau, double h, double r, double band_radius);

/// Increment curves of t -> G_{t-t0}(. - x0) at t0. Norms do not depend on
/// x0 (pure phase). Right increments are measured against the right limit
/// (zero field); the jump at t0 is reported against the pointwise-limit value
/// of the kernel at time 0: the Dirac delta for d=2 (squared mass
/// int (1+|xi|^2)^r dxi), the L2-null half-indicator for d=1 (zero).
struct KernelPathProfile {
    int dim = 2;
    double t0 = 0.0, r = 0.0, band_radius = 200.0;
    std::vector<double> h;
    std::vector<double> right_increment_sq;
    std::vector<double> left_increment_sq;  // distance of F(t0-h) to the left limit: identically 0
    double jump_sq_at_t0 = 0.0;
    double jump_tail_bound = 0.0;
};

KernelPathProfile kernel_path_profile(int dim, double t0, double x0, double r,
                                      const std::vector<double>& h_list,
                                      double band_radius = 200.0);

/// Exact L2 energy of consecutive-snapshot differences of the
/// compound-Poisson component in d=1:
///   P_k = || u2(t_{k+1},.) - u2(t_k,.) ||_{L2}^2,  k = 0..nt-1,
/// computed by interval sweep over the light-cone annuli (the difference
/// field is piecewise constant). atom_sigma empty means sigma == 1.
std::vector<double> u2_increment_energy_d1(const JumpSet& large,
                                           const std::vector<double>& atom_sigma, int nt,
                                           double dt);

/// Step detector for the increment-energy profile: median-of-5 filtering
/// removes transient annulus-overlap blips, rises are flagged when they
/// exceed 5x the median of neighboring rises and an absolute floor, then
/// localized on the raw profile. Reported time t_k means an arrival in
/// (t_{k-1}, t_{k+1}].
struct JumpDetection {
    std::vector<int> slices;
    std::vector<double> times;
    std::vector<double> steps;
};

JumpDetection detect_profile_jumps(const std::vector<double>& profile, double dt,
                                   double floor_step);

/// Log-log least-squares fit of the increment product moment
/// E[ ||X(t+h)-X(t)||^2 ||X(t-h)-X(t)||^2 ] against h, with a bootstrap CI
/// over replicates. product_samples[i][rep] pairs with h_list[i].
struct IncrementStats {
    std::vector<double> h;
    std::vector<double> mean_product;
    std::vector<double> mean_forward;  // E ||X(t+h)-X(t)||^2, must tend to 0
    double slope = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    bool degenerate = false;
    int replicates = 0;
};

IncrementStats fit_increment_exponent(const std::vector<double>& h_list,
                                      const std::vector<std::vector<double>>& product_samples,
                                      const std::vector<std::vector<double>>& forward_samples,
                                      std::uint64_t bootstrap_seed,
                                      int bootstrap_rounds = 500);

} // namespace levywave
