#pragma once

#include <array>
#include <string>
#include <vector>

#include "levywave/common.hpp"

namespace levywave {

double eval_kernel(int dim, double t, double dist);

/// Fundamental solution of the wave equation, d in {1,2}:
///   d=1: G_t(x) = 1/2 on |x| < t
///   d=2: G_t(x) = (2 pi)^{-1} (t^2-|x|^2)^{-1/2} on |x| < t
/// and G_t = 0 for t <= 0. The support radius is t (finite propagation speed).
struct WaveKernel {
    int dim = 1;

    explicit WaveKernel(int d) : dim(d) { require(d == 1 || d == 2, "kernel dimension must be 1 or 2"); }

    double operator()(double t, double dist) const { return eval_kernel(dim, t, dist); }
};

/// F G_t(xi) = sin(t|xi|)/|xi|, value t at xi = 0; 0 for t <= 0.
double kernel_fourier(double t, double xi_norm);

/// int G_t^p dx: 2^{1-p} t (d=1, p>0); (2pi)^{1-p} t^{2-p}/(2-p) (d=2, 0<p<2).
double kernel_p_mass(int dim, double p, double t);

/// int G_t^p |x|^gamma dx. Exact for d=1 (gamma > -1). For d=2 returns the
/// quadrature value and checks it against the closed upper bound
/// (2pi)^{1-p} t^{2-p+gamma}/(2-p); `bound` receives that bound.
double kernel_weighted_mass(int dim, double p, double gamma, double t,
                            double* bound = nullptr);

struct BetaChain {
    std::vector<double> exponents;  // each > -1
    double horizon = 1.0;           // t
};

/// int over 0<t_1<...<t_n<t of prod (t_{j+1}-t_j)^{beta_j}, t_{n+1} = t:
/// prod Gamma(beta_j+1) / Gamma(sum beta_j + n + 1) * t^{sum beta_j + n}.
double beta_chain(const BetaChain& chain);

/// (G_t^a * G_s^b)(x). Closed form in d=1 (indicator powers reduce to an
/// overlap length); nested singular quadrature in d=2. `level` controls the
/// tanh-sinh refinement (mesh halving = level+1).
double convolve_kernels(int dim, double t, double s, double dist, double a, double b,
                        int level = 6);

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// d=1 sub-semigroup relation: (G_{t-s} * G_{s-r})(x) <= (t-r)/2 G_{t-r}(x),
/// checked with 1e-12 absolute slack.
InequalityCheck check_subsemigroup_d1(double r, double s, double t, double x);

/// pointwise power comparison in d=2: G_t^p(x) <= (2 pi t)^{q-p} G_t^q(x), p < q.
InequalityCheck check_power_comparison(double p, double q, double t, double dist);

enum class ConvBoundForm {
    TimeConv,        // int_r^t (G^{2q}*G^{2q})^delta ds <= A_q (t-r)^{1-d(2q-1)} G_{t-r}^{d(2q-1)}
    HoelderWeighted, // int_r^t (t-s)^{2q-p}(s-r)^{2q-p}(G^{2q}*G^{2q}) ds <= C (t-r)^{2(q-p+1)} G^{2q-1}
    MixedPower       // int_r^t (G^{2q}*G^p) ds <= B (t-r)^{3-p-2q} 1{|x|<t-r}
};

struct ConvBoundReport {
    ConvBoundForm form;
    double q = 0.0;
    double second = 0.0;  // delta or p, depending on the form
    double r = 0.0, t = 0.0;
    std::vector<double> dists;       // |x| grid
    std::vector<double> lhs;         // per grid point
    std::vector<double> rhs_shape;   // stated right-hand shape, constant excluded
    double empirical_constant = 0.0; // sup over the grid of lhs / rhs_shape
    int level = 6;                   // quadrature refinement used
    bool pass = false;               // finite constant
};

/// Evaluates one of the three convolution inequalities on an |x| grid and
/// reports the sup ratio as the empirical constant. Stability under
/// refinement is the caller's check (run at level and level+1).
ConvBoundReport check_convolution_bounds(ConvBoundForm form, double q, double second, double r, double t,
                           const std::vector<double>& dists, int level = 6);

} // namespace levywave
