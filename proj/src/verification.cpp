#include "levywave/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levywave/quadrature.hpp"
#include "levywave/rng.hpp"

namespace levywave {

double BoxIntegrand::value(double t, double x, double y) const {
    double v = 0.0;
    for (const auto& p : pieces) {
        if (t < p.t0 || t >= p.t1) continue;
        if (x < p.x0 || x >= p.x1) continue;
        if (dim == 2 && (y < p.y0 || y >= p.y1)) continue;
        v += p.value;
    }
    return v;
}

double BoxIntegrand::abs_power_mass(double p) const {
    // pieces are assumed disjoint (simple function in canonical form)
    double s = 0.0;
    for (const auto& b : pieces) {
        double vol = (b.t1 - b.t0) * (b.x1 - b.x0);
        if (dim == 2) vol *= (b.y1 - b.y0);
        s += std::pow(std::fabs(b.value), p) * vol;
    }
    return s;
}

SimWindow BoxIntegrand::bounding_window() const {
    require(!pieces.empty(), "box integrand needs at least one piece");
    double T = 0.0, R = 0.0;
    for (const auto& b : pieces) {
        T = std::max(T, b.t1);
        R = std::max({R, std::fabs(b.x0), std::fabs(b.x1)});
        if (dim == 2) R = std::max({R, std::fabs(b.y0), std::fabs(b.y1)});
    }
    return SimWindow(T, R, dim);
}

namespace {

struct MeanSe {
    double mean = 0.0, se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe m;
    double n = static_cast<double>(v.size());
    for (double x : v) m.mean += x;
    m.mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - m.mean) * (x - m.mean);
    var /= n * std::max(n - 1.0, 1.0);
    m.se = std::sqrt(var);
    return m;
}

std::string fmt_params(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) os << " ";
        first = false;
        os << k << "=" << v;
    }
    return os.str();
}

} // namespace

CheckReport rosenthal_check(const BoxIntegrand& H, double p, const LevyMeasure& measure,
                            double epsilon, int replicates, std::uint64_t seed) {
    require(p >= 2.0, "Rosenthal check needs p >= 2");
    require(epsilon > 0.0 && epsilon < 1.0, "Rosenthal band needs eps in (0,1)");
    CheckReport rep;
    rep.check = "rosenthal-maximal";
    rep.tag = "compensated-band maximal moment";
    rep.params = fmt_params({{"p", p}, {"eps", epsilon}});
    rep.replicates = replicates;
    rep.seed = seed;

    SimWindow window = H.bounding_window();
    const double m2 = measure.abs_moment_band(2.0, epsilon, 1.0);
    const double mp = measure.abs_moment_band(p, epsilon, 1.0);
    const double m1s = measure.signed_moment_band(epsilon, 1.0);  // compensator rate
    const double band_mass = measure.band_mass(epsilon, 1.0);

    const double quad_h2 = H.abs_power_mass(2.0) * m2;  // int H^2 z^2 nu dx dt
    const double quad_hp = H.abs_power_mass(p) * mp;
    rep.rhs = std::pow(quad_h2, 0.5 * p) + quad_hp;

    std::vector<double> sup_p(replicates), end_sq(replicates);
    Rng root(seed);
    for (int r = 0; r < replicates; ++r) {
        Rng rng = root.substream("rosenthal", static_cast<std::uint64_t>(r));
        std::uint64_t n = rng.poisson(band_mass * window.volume());
        struct Ev {
            double t, hz;
        };
        std::vector<Ev> evs;
        evs.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            double t = rng.uniform(0.0, window.horizon);
            double x = rng.uniform(-window.radius, window.radius);
            double y = window.dim == 2 ? rng.uniform(-window.radius, window.radius) : 0.0;
            double z = measure.sample_band_mark(epsilon, 1.0, rng);
            double hv = H.value(t, x, y);
            if (hv != 0.0) evs.push_back({t, hv * z});
        }
        std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });
        // compensator slope is piecewise constant in t over the box pieces;
        // evaluate the path at jump times and piece corners
        auto compensator = [&](double t) {
            double c = 0.0;
            for (const auto& b : H.pieces) {
                double span = std::clamp(t, b.t0, b.t1) - b.t0;
                if (span <= 0.0) continue;
                double xlen = (b.x1 - b.x0) * (H.dim == 2 ? (b.y1 - b.y0) : 1.0);
                c += b.value * xlen * span;
            }
            return c * m1s;
        };
        std::vector<double> probes{0.0, window.horizon};
        for (const auto& b : H.pieces) {
            probes.push_back(b.t0);
            probes.push_back(b.t1);
        }
        double sup_abs = 0.0, acc = 0.0;
        std::size_t ei = 0;
        std::sort(probes.begin(), probes.end());
        auto consider = [&](double t, double jumped) {
            double v = jumped - compensator(t);
            sup_abs = std::max(sup_abs, std::fabs(v));
        };
        for (double t : probes) {
            while (ei < evs.size() && evs[ei].t <= t) {
                consider(evs[ei].t, acc);  // left limit at the jump
                acc += evs[ei].hz;
                consider(evs[ei].t, acc);
                ++ei;
            }
            consider(t, acc);
        }
        while (ei < evs.size()) {  // guard: events after the last probe
            consider(evs[ei].t, acc);
            acc += evs[ei].hz;
            consider(evs[ei].t, acc);
            ++ei;
        }
        double end_val = acc - compensator(window.horizon);
        sup_p[r] = std::pow(sup_abs, p);
        end_sq[r] = end_val * end_val;
    }
    MeanSe sup_stat = mean_se(sup_p);
    MeanSe end_stat = mean_se(end_sq);
    rep.lhs = sup_stat.mean;
    rep.lhs_se = sup_stat.se;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    if (p == 2.0) {
        // compensated-Poisson isometry: E |I_T|^2 = int H^2 z^2 nu, an equality
        double target = quad_h2;
        bool iso = std::fabs(end_stat.mean - target) <= 3.0 * end_stat.se + 1e-12;
        rep.pass = iso && std::isfinite(rep.ratio);
        std::ostringstream os;
        os << "isometry: MC " << end_stat.mean << " +- " << end_stat.se << " vs quadrature "
           << target;
        rep.note = os.str();
    } else {
        rep.pass = std::isfinite(rep.ratio) && rep.rhs > 0.0;
    }
    return rep;
}

CheckReport poisson_moment_check(const BoxIntegrand& H, double p, const LevyMeasure& measure,
                                 double cap, int replicates, std::uint64_t seed) {
    require(p >= 2.0, "Poisson moment check needs p >= 2");
    require(cap > 1.0, "uncompensated band needs a cap > 1");
    CheckReport rep;
    rep.check = "poisson-moment";
    rep.tag = "uncompensated-band moment";
    rep.params = fmt_params({{"p", p}, {"cap", cap}});
    rep.replicates = replicates;
    rep.seed = seed;

    const double m1 = measure.abs_moment_band(1.0, 1.0, cap);
    const double quad_h1 = H.abs_power_mass(1.0) * m1;
    if (!std::isfinite(quad_h1))
        throw divergence_error("poisson moment check needs int |H| |z| nu < infinity");
    const double m2 = measure.abs_moment_band(2.0, 1.0, cap);
    const double mp = measure.abs_moment_band(p, 1.0, cap);
    const double band_mass = measure.band_mass(1.0, cap);
    rep.rhs = std::pow(H.abs_power_mass(2.0) * m2, 0.5 * p) + H.abs_power_mass(p) * mp +
              std::pow(quad_h1, p);

    SimWindow window = H.bounding_window();
    std::vector<double> vals(replicates);
    Rng root(seed);
    for (int r = 0; r < replicates; ++r) {
        Rng rng = root.substream("poisson-moment", static_cast<std::uint64_t>(r));
        std::uint64_t n = rng.poisson(band_mass * window.volume());
        double acc = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            double t = rng.uniform(0.0, window.horizon);
            double x = rng.uniform(-window.radius, window.radius);
            double y = window.dim == 2 ? rng.uniform(-window.radius, window.radius) : 0.0;
            double z = measure.sample_band_mark(1.0, cap, rng);
            acc += H.value(t, x, y) * z;
        }
        vals[r] = std::pow(std::fabs(acc), p);
    }
    MeanSe stat = mean_se(vals);
    rep.lhs = stat.mean;
    rep.lhs_se = stat.se;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    rep.pass = std::isfinite(rep.ratio);
    return rep;
}

CheckReport convolution_moment_check(const NoiseSpec& spec, double t, double x,
                                     int replicates, std::uint64_t seed) {
    const AssumptionA& a = spec.assumption;
    CheckReport rep;
    rep.check = "convolution-moment";
    rep.tag = "stochastic convolution moment transfer";
    rep.params = fmt_params({{"p", a.p}, {"q", a.q}, {"t", t}, {"x", x},
                             {"N", static_cast<double>(spec.trunc.level)}});
    rep.replicates = replicates;
    rep.seed = seed;

    require(t > 0.0 && t <= spec.window.horizon, "time must lie inside the window");
    const bool low = a.p < 1.0;
    auto h_weight = [&](double y1, double y2) {
        double dist = spec.window.dim == 1 ? std::fabs(y1) : std::hypot(y1, y2);
        return std::pow(spec.trunc.weight(dist), a.p - a.q);
    };
    // right side: int_0^t int (G^p [+ G]) h^{p-q} dy ds over the light cone
    double rhs;
    if (spec.window.dim == 1) {
        auto inner = [&](double s) {
            double span = t - s;
            return integrate(
                [&](double y) {
                    double g = eval_kernel(1, span, x - y);
                    double gp = std::pow(g, a.p) + (low ? 0.0 : g);
                    return gp * h_weight(y, 0.0);
                },
                x - span, x + span, 1e-9, 1e-13);
        };
        rhs = integrate(inner, 0.0, t, 1e-8, 1e-12);
    } else {
        auto inner = [&](double s) {
            double span = t - s;
            // edge coordinates u = span - rho for the (span^2-rho^2)^{-p/2} cone edge
            auto radial = [&](double u) {
                double rho = span - u;
                double core = u * (2.0 * span - u);
                double gp = std::pow(2.0 * kPi, -a.p) * std::pow(core, -0.5 * a.p) +
                            (low ? 0.0 : std::pow(2.0 * kPi, -1.0) * std::pow(core, -0.5));
                // angular average of h^{p-q} on the circle of radius rho around x
                double ang = integrate(
                    [&](double phi) {
                        return h_weight(x + rho * std::cos(phi), rho * std::sin(phi));
                    },
                    0.0, 2.0 * kPi, 1e-7, 1e-11);
                return gp * ang * rho;
            };
            return integrate_edge(radial, span, 6);
        };
        rhs = integrate_tanh_sinh(inner, 0.0, t, 5);
    }
    rep.rhs = rhs;

    Grid grid(spec.window.dim, spec.dt, spec.dx, spec.window.horizon,
              std::max(0.0, spec.window.radius - spec.window.horizon), spec.window.radius);
    std::vector<double> vals(replicates);
    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
        NoiseSpec local = spec;
        local.outside_overflow = false;
        NoiseRealization nr =
            sample_noise(local, Rng(seed).substream("convcheck", r).next_u64());
        double v = stochastic_convolution(nr, grid, {}, t, x);
        vals[r] = std::pow(std::fabs(v), a.p);
    });
    MeanSe stat = mean_se(vals);
    rep.lhs = stat.mean;
    rep.lhs_se = stat.se;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : kInf;
    rep.pass = std::isfinite(rep.ratio);
    return rep;
}

MomentScan moment_bound_scan(const MomentScanConfig& cfg) {
    MomentScan scan;
    scan.eval_times = cfg.eval_times;
    scan.eval_points = cfg.eval_points;
    scan.replicates = cfg.replicates;
    require(cfg.grid.dim == 1, "the moment scan evaluates d=1 grids");

    std::vector<int> t_idx, x_idx;
    for (double t : cfg.eval_times) {
        double k = t / cfg.grid.dt;
        require(std::fabs(k - std::round(k)) < 1e-9, "eval time off the grid");
        t_idx.push_back(static_cast<int>(std::round(k)));
    }
    for (double x : cfg.eval_points) {
        double j = (x + cfg.grid.radius) / cfg.grid.dx;
        require(std::fabs(j - std::round(j)) < 1e-9, "eval point off the grid");
        x_idx.push_back(static_cast<int>(std::round(j)));
    }

    struct RepResult {
        std::vector<double> powers;  // |u|^p on the eval grid, flattened
        bool converged = false;
        bool cauchy = false;
        int iterations = 0;
    };
    std::vector<RepResult> results(cfg.replicates);
    parallel_for(static_cast<std::size_t>(cfg.replicates), [&](std::size_t r) {
        NoiseRealization nr =
            sample_noise(cfg.noise, Rng(cfg.seed).substream("moment-scan", r).next_u64());
        SolutionPath path = picard_solve(cfg.init, cfg.sigma, nr, cfg.grid, cfg.picard);
        RepResult& res = results[r];
        res.converged = path.converged;
        res.iterations = path.iterations;
        std::size_t nd = path.distances.size();
        bool decaying = nd >= 3 ? (path.distances[nd - 1] <= path.distances[nd - 2] &&
                                   path.distances[nd - 2] <= path.distances[nd - 3])
                                : true;
        res.cauchy = path.converged && decaying;
        if (!path.converged) return;
        res.powers.reserve(t_idx.size() * x_idx.size());
        for (int k : t_idx)
            for (int j : x_idx)
                res.powers.push_back(std::pow(std::fabs(path.u[k][j]), cfg.p));
    });

    scan.table.assign(t_idx.size(), std::vector<double>(x_idx.size(), 0.0));
    double mean_it = 0.0;
    for (const auto& res : results) {
        if (res.converged) {
            ++scan.converged;
            std::size_t f = 0;
            for (std::size_t i = 0; i < t_idx.size(); ++i)
                for (std::size_t j = 0; j < x_idx.size(); ++j)
                    scan.table[i][j] += res.powers[f++];
        } else {
            ++scan.failed;
        }
        if (res.cauchy) ++scan.cauchy_ok;
        mean_it += res.iterations;
    }
    require(scan.converged > 0, "no replicate converged; the scan is empty");
    for (auto& row : scan.table)
        for (double& v : row) {
            v /= scan.converged;
            scan.sup = std::max(scan.sup, v);
        }
    scan.mean_iterations = mean_it / cfg.replicates;
    return scan;
}

CosAverageReport cos_average_bound_check(double T, const std::vector<double>& xi_grid) {
    require(T > 0.0, "cosine average needs T > 0");
    CosAverageReport rep;
    rep.horizon = T;
    rep.xi = xi_grid;
    for (double xi : xi_grid) {
        double a = std::fabs(xi);
        double lhs;
        if (a < 1e-12) {
            lhs = T;
        } else {
            // integrate between the kinks of |cos(r a)| at r = (pi/2 + k pi)/a
            auto f = [&](double r) { return std::fabs(std::cos(r * a)); };
            lhs = 0.0;
            double prev = 0.0;
            for (int k = 0;; ++k) {
                double kink = (0.5 * kPi + k * kPi) / a;
                if (kink >= T) break;
                lhs += integrate(f, prev, kink, 1e-12, 1e-15);
                prev = kink;
            }
            lhs += integrate(f, prev, T, 1e-12, 1e-15);
        }
        rep.lhs.push_back(lhs);
        rep.empirical_constant =
            std::max(rep.empirical_constant, lhs * std::sqrt(1.0 + xi * xi));
    }
    rep.pass = std::isfinite(rep.empirical_constant);
    return rep;
}

} // namespace levywave
