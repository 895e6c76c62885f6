#include "levywave/wave_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "levywave/quadrature.hpp"

namespace levywave {

double eval_kernel(int dim, double t, double dist) {
    if (t <= 0.0) return 0.0;
    double a = std::fabs(dist);
    if (a >= t) return 0.0;
    if (dim == 1) return 0.5;
    return 1.0 / (2.0 * kPi * std::sqrt(t * t - a * a));
}

double kernel_fourier(double t, double xi_norm) {
    if (t <= 0.0) return 0.0;
    double r = std::fabs(xi_norm);
    if (r < 1e-8) {
        // sin(tr)/r = t (1 - (tr)^2/6 + ...)
        double tr = t * r;
        return t * (1.0 - tr * tr / 6.0);
    }
    return std::sin(t * r) / r;
}

double kernel_p_mass(int dim, double p, double t) {
    require(p > 0.0, "kernel mass exponent p must be > 0");
    require(t > 0.0, "kernel mass needs t > 0");
    if (dim == 1) return std::pow(2.0, 1.0 - p) * t;
    if (p >= 2.0)
        throw divergence_error("int G_t^p dx diverges for d=2 and p >= 2");
    return std::pow(2.0 * kPi, 1.0 - p) * std::pow(t, 2.0 - p) / (2.0 - p);
}

double kernel_weighted_mass(int dim, double p, double gamma, double t, double* bound) {
    require(t > 0.0, "weighted mass needs t > 0");
    if (dim == 1) {
        require(gamma > -1.0, "d=1 weighted mass needs gamma > -1");
        if (bound) *bound = kInf;
        return std::pow(2.0, 1.0 - p) / (gamma + 1.0) * std::pow(t, gamma + 1.0);
    }
    require(p > 0.0 && p < 2.0, "d=2 weighted mass needs p in (0,2)");
    require(gamma > 0.0, "d=2 weighted mass needs gamma > 0");
    // |x| = t cos(v): the cone edge sits at v = 0 where the integrand behaves
    // like v^{1-p}; integrate in distance-to-edge coordinates
    auto integrand = [&](double v) {
        return std::pow(t * std::cos(v), gamma + 1.0) * std::pow(t * std::sin(v), 1.0 - p);
    };
    double val = std::pow(2.0 * kPi, 1.0 - p) * integrate_edge(integrand, 0.5 * kPi, 8);
    double ub = std::pow(2.0 * kPi, 1.0 - p) / (2.0 - p) * std::pow(t, 2.0 - p + gamma);
    if (bound) *bound = ub;
    require(val <= ub * (1.0 + 1e-9) + 1e-12, "weighted mass exceeded its closed bound");
    return val;
}

double beta_chain(const BetaChain& chain) {
    require(!chain.exponents.empty(), "beta chain needs n >= 1");
    require(chain.horizon > 0.0, "beta chain needs t > 0");
    double sum = 0.0, log_num = 0.0;
    for (double b : chain.exponents) {
        require(b > -1.0, "beta chain exponents must each be > -1");
        sum += b;
        log_num += std::lgamma(b + 1.0);
    }
    double n = static_cast<double>(chain.exponents.size());
    double log_val = log_num - std::lgamma(sum + n + 1.0) + (sum + n) * std::log(chain.horizon);
    return std::exp(log_val);
}

namespace {

/// inner angular factor of the d=2 convolution:
/// int over the circle of G_s^b(x - u) for |u| = rho, |x| = r.
double angular_conv_d2(double s, double b, double r, double rho, int level) {
    // squared distance w^2 = r^2 + rho^2 - 2 r rho cos(phi), increasing in phi
    double w_min = std::fabs(r - rho), w_max = r + rho;
    if (w_min >= s) return 0.0;
    const double c2pi = std::pow(2.0 * kPi, -b);
    if (r * rho < 1e-14) {
        double w = 0.5 * (w_min + w_max);  // degenerate circle: w is constant
        return 2.0 * kPi * c2pi * std::pow(s * s - w * w, -0.5 * b);
    }
    if (w_max < s) {
        // whole circle inside the support; near-singular only toward phi = pi
        // when the circle almost touches the edge. In v = pi - phi,
        // s^2 - w^2 = (s^2 - w_max^2) + 4 r rho sin^2(v/2), stable throughout.
        double gap = (s - w_max) * (s + w_max);
        auto f = [&](double v) {
            double sv = std::sin(0.5 * v);
            return c2pi * std::pow(gap + 4.0 * r * rho * sv * sv, -0.5 * b);
        };
        return 2.0 * integrate_edge(f, kPi, level);
    }
    // cap: the integrand is singular where w = s. In distance coordinates
    // v = phi* - phi,  s^2 - w^2 = 4 r rho sin(phi* - v/2) sin(v/2), exact
    // near v = 0, so the v^{-b/2} edge keeps full accuracy.
    double cphi = (r * r + rho * rho - s * s) / (2.0 * r * rho);
    double phi_star = std::acos(std::clamp(cphi, -1.0, 1.0));
    if (phi_star <= 0.0) return 0.0;
    auto f = [&](double v) {
        double d = 4.0 * r * rho * std::sin(phi_star - 0.5 * v) * std::sin(0.5 * v);
        if (d <= 0.0) return 0.0;
        return c2pi * std::pow(d, -0.5 * b);
    };
    return 2.0 * integrate_edge(f, phi_star, level);
}

} // namespace

double convolve_kernels(int dim, double t, double s, double dist, double a, double b,
                        int level) {
    require(t > 0.0 && s > 0.0, "convolution needs t > 0 and s > 0");
    double r = std::fabs(dist);
    if (r >= t + s) return 0.0;  // support arithmetic
    if (dim == 1) {
        // G_t^a = 2^{-a} 1{|x|<t}; the convolution is an overlap length
        double lo = std::max(-s, r - t), hi = std::min(s, r + t);
        double overlap = std::max(0.0, hi - lo);
        return std::pow(2.0, -a - b) * overlap;
    }
    require(a < 2.0 && b < 2.0, "d=2 kernel powers must be < 2 for an integrable convolution");
    auto outer = [&](double rho) {
        double ang = angular_conv_d2(s, b, r, rho, level);
        if (ang == 0.0) return 0.0;
        double core = (t - rho) * (t + rho);
        return std::pow(2.0 * kPi, -a) * std::pow(core, -0.5 * a) * rho * ang;
    };
    // segment at the radii where the moving circle is tangent to the second
    // kernel's edge (the angular factor spikes there), plus the rho = t cone
    // edge; integrate each segment in distance-to-end coordinates
    std::vector<double> cuts{0.0};
    for (double rc : {std::fabs(s - r), s + r})
        if (rc > 1e-13 && rc < t - 1e-13 && rc > cuts.back() + 1e-13) cuts.push_back(rc);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(t);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        double mid = 0.5 * (lo + hi);
        total += integrate_edge([&](double u) { return outer(lo + u); }, mid - lo, level);
        total += integrate_edge([&](double u) { return outer(hi - u); }, hi - mid, level);
    }
    return total;
}

InequalityCheck check_subsemigroup_d1(double r, double s, double t, double x) {
    require(r < s && s < t, "sub-semigroup check needs r < s < t");
    InequalityCheck c;
    c.lhs = convolve_kernels(1, t - s, s - r, x, 1.0, 1.0);
    c.rhs = 0.5 * (t - r) * eval_kernel(1, t - r, x);
    c.pass = c.lhs <= c.rhs + 1e-12;
    return c;
}

InequalityCheck check_power_comparison(double p, double q, double t, double dist) {
    require(p <= q, "power comparison needs p <= q");
    require(std::fabs(dist) < t, "power comparison point must lie inside the light cone");
    InequalityCheck c;
    double g = eval_kernel(2, t, dist);
    c.lhs = std::pow(g, p);
    c.rhs = std::pow(2.0 * kPi * t, q - p) * std::pow(g, q);
    c.pass = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
    return c;
}

namespace {

/// integral of f over [r,t] where f blows up (integrably) exactly on the
/// interior set where the two cone edges are internally tangent:
/// s* = (t + r -+ |x|)/2. Each segment is integrated in distance-to-
/// singularity coordinates so the spikes keep full accuracy.
template <class F>
double integrate_time_with_tangency(const F& f, double r, double t, double dist, int level) {
    std::vector<double> cuts{r};
    double s1 = 0.5 * (t + r - std::fabs(dist));
    double s2 = 0.5 * (t + r + std::fabs(dist));
    if (s1 > r + 1e-13 && s1 < t - 1e-13) cuts.push_back(s1);
    if (s2 > cuts.back() + 1e-13 && s2 < t - 1e-13) cuts.push_back(s2);
    cuts.push_back(t);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        bool sing_left = i > 0;                   // interior cuts are singular
        bool sing_right = i + 2 < cuts.size();
        double mid = 0.5 * (a + b);
        if (sing_left || !sing_right)
            total += integrate_edge([&](double u) { return f(a + u); }, mid - a, level);
        else
            total += integrate_tanh_sinh(f, a, mid, level);
        if (sing_right || !sing_left)
            total += integrate_edge([&](double u) { return f(b - u); }, b - mid, level);
        else
            total += integrate_tanh_sinh(f, mid, b, level);
    }
    return total;
}

} // namespace

ConvBoundReport check_convolution_bounds(ConvBoundForm form, double q, double second, double r, double t,
                           const std::vector<double>& dists, int level) {
    require(t > r, "convolution-bound check needs r < t");
    require(q > 0.5 && q < 1.0, "convolution-bound family needs q in (1/2, 1)");
    switch (form) {
        case ConvBoundForm::TimeConv:
            require(second >= 1.0 && second <= 1.0 / q, "delta must lie in [1, 1/q]");
            break;
        case ConvBoundForm::HoelderWeighted:
            require(second < 2.0 * q && second > 0.0, "needs 0 < p < 2q");
            break;
        case ConvBoundForm::MixedPower:
            require(second > 0.0 && second < 1.0 && second + 2.0 * q <= 3.0,
                    "needs p in (0,1) with p + 2q <= 3");
            break;
    }
    ConvBoundReport rep;
    rep.form = form;
    rep.q = q;
    rep.second = second;
    rep.r = r;
    rep.t = t;
    rep.dists = dists;
    rep.level = level;

    const double span = t - r;
    for (double dist : dists) {
        double lhs = 0.0, shape = 0.0;
        switch (form) {
            case ConvBoundForm::TimeConv: {
                double delta = second;
                auto f = [&](double s) {
                    if (t - s <= 0.0 || s - r <= 0.0) return 0.0;
                    double c = convolve_kernels(2, t - s, s - r, dist, 2.0 * q, 2.0 * q, level);
                    return std::pow(c, delta);
                };
                lhs = integrate_time_with_tangency(f, r, t, dist, level);
                shape = std::pow(span, 1.0 - delta * (2.0 * q - 1.0)) *
                        std::pow(eval_kernel(2, span, dist), delta * (2.0 * q - 1.0));
                break;
            }
            case ConvBoundForm::HoelderWeighted: {
                double p = second;
                auto f = [&](double s) {
                    if (t - s <= 0.0 || s - r <= 0.0) return 0.0;
                    double c = convolve_kernels(2, t - s, s - r, dist, 2.0 * q, 2.0 * q, level);
                    return std::pow(t - s, 2.0 * q - p) * std::pow(s - r, 2.0 * q - p) * c;
                };
                lhs = integrate_time_with_tangency(f, r, t, dist, level);
                shape = std::pow(span, 2.0 * (q - p + 1.0)) *
                        std::pow(eval_kernel(2, span, dist), 2.0 * q - 1.0);
                break;
            }
            case ConvBoundForm::MixedPower: {
                double p = second;
                auto f = [&](double s) {
                    if (t - s <= 0.0 || s - r <= 0.0) return 0.0;
                    return convolve_kernels(2, t - s, s - r, dist, 2.0 * q, p, level);
                };
                lhs = integrate_time_with_tangency(f, r, t, dist, level);
                shape = std::fabs(dist) < span ? std::pow(span, 3.0 - p - 2.0 * q) : 0.0;
                break;
            }
        }
        rep.lhs.push_back(lhs);
        rep.rhs_shape.push_back(shape);
        if (shape > 0.0)
            rep.empirical_constant = std::max(rep.empirical_constant, lhs / shape);
        else
            require(lhs < 1e-12, "convolution-bound left side must vanish outside the light cone");
    }
    rep.pass = std::isfinite(rep.empirical_constant);
    return rep;
}

} // namespace levywave
