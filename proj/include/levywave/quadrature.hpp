#pragma once

#include <cmath>
#include <vector>

#include "levywave/common.hpp"

namespace levywave {

/// Gauss--Kronrod 7/15 on [a,b]. Returns the K15 value, writes the
/// G7-vs-K15 error estimate.
template <class F>
double quad_gk15(const F& f, double a, double b, double& err) {
    // nodes on the half-interval, {abscissa, gauss weight, kronrod weight}
    static const double nw[8][3] = {
        {0.000000000000000, 0.417959183673469, 0.209482141084728},
        {0.405845151377397, 0.381830050505119, 0.190350578064785},
        {0.741531185599394, 0.279705391489277, 0.140653259715525},
        {0.949107912342759, 0.129484966168870, 0.063092092629979},
        {0.207784955007898, 0.0, 0.204432940075298},
        {0.586087235467691, 0.0, 0.169004726639267},
        {0.864864423359769, 0.0, 0.104790010322250},
        {0.991455371120813, 0.0, 0.022935322010529}};

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double y0 = f(mid);
    double g7 = nw[0][1] * y0;
    double k15 = nw[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        double dx = half * nw[i][0];
        double yi = f(mid + dx) + f(mid - dx);
        g7 += nw[i][1] * yi;
        k15 += nw[i][2] * yi;
    }
    g7 *= half;
    k15 *= half;
    err = std::pow(200.0 * std::fabs(g7 - k15), 1.5);
    return k15;
}

/// Adaptive bisection driver around quad_gk15.
template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 1e-14, int max_intervals = 4000) {
    if (a == b) return 0.0;
    struct Seg { double a, b; };
    std::vector<Seg> stack{{a, b}};
    stack.reserve(64);
    double sum = 0.0;
    int used = 1;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        double err;
        double v = quad_gk15(f, s.a, s.b, err);
        if (err < rel_tol * std::fabs(v) + abs_tol || used >= max_intervals ||
            s.b - s.a < 1e-14 * (std::fabs(s.a) + std::fabs(s.b) + 1.0)) {
            sum += v;
            continue;
        }
        double mid = 0.5 * (s.a + s.b);
        stack.push_back({s.a, mid});
        stack.push_back({mid, s.b});
        used += 2;
    }
    return sum;
}

/// Adaptive integration with an initial uniform split, for oscillatory
/// integrands where one GK panel would alias.
template <class F>
double integrate_split(const F& f, double a, double b, int pieces,
                       double rel_tol = 1e-10, double abs_tol = 1e-14) {
    if (pieces < 1) pieces = 1;
    double sum = 0.0;
    double w = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i)
        sum += integrate(f, a + i * w, a + (i + 1) * w, rel_tol, abs_tol / pieces);
    return sum;
}

/// tanh-sinh rule on (a,b): x = mid + half*tanh(pi/2 sinh t). Fine for smooth
/// integrands and for endpoint behavior no worse than u^{-0.6} or so; for
/// harder edge singularities use integrate_edge with the integrand written in
/// distance-to-edge coordinates (node placement next to a nonzero endpoint
/// loses everything below one ulp of the endpoint).
template <class F>
double integrate_tanh_sinh(const F& f, double a, double b, int level = 7) {
    if (a == b) return 0.0;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double t_max = 4.0;
    const int n_side = 1 << level;
    const double step = t_max / n_side;
    double sum = 0.0;
    for (int k = -n_side; k <= n_side; ++k) {
        double t = k * step;
        double st = std::sinh(t);
        double x = std::tanh(0.5 * kPi * st);
        double ch = std::cosh(0.5 * kPi * st);
        double w = 0.5 * kPi * std::cosh(t) / (ch * ch);
        double xx = mid + half * x;
        if (xx <= a || xx >= b || w < 1e-300) continue;
        double y = f(xx);
        if (std::isfinite(y)) sum += w * y;
    }
    return sum * half * step;
}

/// int_0^length f(u) du with an integrable singularity at u = 0. Nodes are
/// computed as exact products length * om/2 with om = 1 - tanh(pi/2 sinh t)
/// evaluated in underflow-safe form, so f sees distances down to ~1e-300 and
/// exponents as hard as u^{-0.99} keep full accuracy.
template <class F>
double integrate_edge(const F& f, double length, int level = 7) {
    if (length == 0.0) return 0.0;
    const double t_max = 6.4;
    const int n_side = 1 << level;
    const double step = t_max / n_side;
    const double half = 0.5 * length;
    double sum = 0.0;
    for (int k = -n_side; k <= n_side; ++k) {
        double t = k * step;
        double y = 0.5 * kPi * std::sinh(t);
        // om = 1 - tanh(y) = 2 e^{-2y} / (1 + e^{-2y}), stable for y -> +inf
        double e;
        double om;
        if (y >= 0.0) {
            e = std::exp(-2.0 * y);
            om = 2.0 * e / (1.0 + e);
        } else {
            e = std::exp(2.0 * y);
            om = 2.0 / (1.0 + e);
        }
        // dx/dt = (pi/2) cosh t * sech^2(y); sech(y) = 2 e^{-|y|} / (1+e^{-2|y|})
        double ey = std::exp(-std::fabs(y));
        double sech = 2.0 * ey / (1.0 + ey * ey);
        double w = 0.5 * kPi * std::cosh(t) * sech * sech;
        if (w < 1e-300) continue;
        double u = half * om;
        if (u <= 0.0 || u >= length) continue;
        double v = f(u);
        if (std::isfinite(v)) sum += w * v;
    }
    return sum * half * step;
}

/// integral over [a, infinity) via x = a + u/(1-u)
template <class F>
double integrate_half_line(const F& f, double a, double rel_tol = 1e-10,
                           double abs_tol = 1e-14) {
    auto g = [&](double u) {
        double om = 1.0 - u;
        double x = a + u / om;
        return f(x) / (om * om);
    };
    return integrate(g, 0.0, 1.0, rel_tol, abs_tol);
}

} // namespace levywave
