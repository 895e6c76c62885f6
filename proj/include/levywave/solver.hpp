#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "levywave/noise.hpp"
#include "levywave/wave_kernel.hpp"

namespace levywave {

/// Snapshot lattice: t_k = k dt for k = 0..nt(), x_j = -R + j dx per axis,
/// j = 0..nx() inclusive. R >= A + T so values on |x| <= A are exact in law
/// for the jump parts (finite propagation speed).
struct Grid {
    int dim = 1;
    double dt = 0.0, dx = 0.0;
    double horizon = 1.0;      // T
    double eval_radius = 1.0;  // A
    double radius = 2.0;       // R

    Grid() = default;
    Grid(int d, double dt_, double dx_, double T, double A, double R)
        : dim(d), dt(dt_), dx(dx_), horizon(T), eval_radius(A), radius(R) {
        require(d == 1 || d == 2, "grid dimension must be 1 or 2");
        require(dt_ > 0.0 && dx_ > 0.0, "grid steps must be positive");
        require(R + 1e-12 >= A + T,
                "grid needs R >= A + T (finite speed of propagation)");
        double ntf = T / dt_, nxf = 2.0 * R / dx_;
        require(std::fabs(ntf - std::round(ntf)) < 1e-9, "T must be a multiple of dt");
        require(std::fabs(nxf - std::round(nxf)) < 1e-9, "2R must be a multiple of dx");
    }

    int nt() const { return static_cast<int>(std::round(horizon / dt)); }
    int nx() const { return static_cast<int>(std::round(2.0 * radius / dx)); }
    std::size_t points_per_slice() const {
        std::size_t n = static_cast<std::size_t>(nx()) + 1;
        return dim == 1 ? n : n * n;
    }
    double x_of(int j) const { return -radius + j * dx; }
    double t_of(int k) const { return k * dt; }
    std::size_t sindex(int ix, int iy) const {
        return dim == 1 ? static_cast<std::size_t>(ix)
                        : static_cast<std::size_t>(ix) * (nx() + 1) + iy;
    }
};

struct InitialData {
    std::string name = "zero";
    std::function<double(double, double)> u0;
    std::function<double(double, double)> v0;
    // gradient of u0, needed for the d=2 time-derivative term
    std::function<std::array<double, 2>(double, double)> grad_u0;
    double q0 = kInf;  // d=2 integrability exponent, declared
    // declared d=1 path-regularity properties: u0, v0 integrable and
    // |F u0(xi)| <= fourier_decay_c / (1+|xi|^2)
    bool u0_l1 = false;
    bool v0_l1 = false;
    double fourier_decay_c = kInf;

    static InitialData registry(const std::string& name);
};

/// Lipschitz coefficient sigma from a named registry, so the constants the
/// assumption checks need stay declared instead of inferred.
struct SigmaFn {
    std::string name = "constant";
    std::function<double(double)> fn;
    double lipschitz = 0.0;
    bool bounded = true;
    double bound = 1.0;

    double operator()(double u) const { return fn(u); }
    static SigmaFn registry(const std::string& name);
};

/// One realization of u_N on the grid, decomposed as
/// u = w + u1 (small-jump part) + u2 (compound-Poisson part) + u3 (drift part).
struct SolutionPath {
    Grid grid;
    int level = 1;
    double tau = kInf;
    std::vector<std::vector<double>> w, u1, u2, u3, u;  // [k][spatial]
    std::vector<double> distances;  // per-iteration sup distances
    bool converged = false;
    int iterations = 0;
    int effective_iterations = 0;   // iterations whose distance exceeded tol
    std::vector<int> source_level;  // per snapshot, set by patching
};

/// w(t,x): d'Alembert in d=1, singular-quadrature convolutions in d=2 with the
/// time derivative taken analytically under the integral.
double homogeneous_wave(const InitialData& init, int dim, double t, double x1,
                        double x2 = 0.0);

/// sigma values entering the convolution sums; empty vectors mean sigma == 1.
struct ConvolutionWeights {
    std::vector<double> atom_sigma;  // per large-jump atom, sigma(u(T_i-, X_i))
    std::vector<double> cell_sigma;  // per small-jump cell, sigma at the midpoint
    double drift_sigma_integral = 0.0;  // precomputed for the drift part, optional
};

/// Atom-sum + cell-sum + drift Riemann approximation of the stochastic
/// convolution at one point. Throws coverage_error if (t,x) leaves the window.
double stochastic_convolution(const NoiseRealization& noise, const Grid& grid,
                              const ConvolutionWeights& weights, double t, double x1,
                              double x2 = 0.0);

struct PicardOptions {
    int max_iters = 100;
    double tol = 1e-6;
    bool force_full_iters = false;  // run exactly max_iters (finite-speed tests)
};

SolutionPath picard_solve(const InitialData& init, const SigmaFn& sigma,
                          const NoiseRealization& noise, const Grid& grid,
                          const PicardOptions& opts = {});

/// u(t_k, .) = u_N(t_k, .) for the smallest N with t_k <= tau_N. Paths must
/// come from coupled realizations (same base streams, increasing levels).
SolutionPath patch_solution(const std::vector<SolutionPath>& paths);

/// Small-jump component snapshots at selected times (sigma == 1), evaluated
/// directly; this is the martingale part the regularity diagnostics consume.
std::vector<std::vector<double>> small_jump_snapshots(const NoiseRealization& noise,
                                                      const Grid& grid,
                                                      const std::vector<double>& times);

} // namespace levywave
