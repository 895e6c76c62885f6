#include "levywave/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "levywave/fft.hpp"
#include "levywave/quadrature.hpp"
#include "levywave/rng.hpp"

namespace levywave {

namespace {

double tail_integral(int dim, double r, double band) {
    // int_{|xi| > band} (1+|xi|^2)^r dxi, finite for 2r < -1 (d=1), 2r < -2 (d=2)
    if (dim == 1) {
        if (2.0 * r + 1.0 >= 0.0) return kInf;
        return 2.0 * std::pow(band, 2.0 * r + 1.0) / (-(2.0 * r + 1.0));
    }
    if (r + 1.0 >= 0.0) return kInf;
    return kPi * std::pow(1.0 + band * band, r + 1.0) / (-(r + 1.0));
}

} // namespace

HrNormResult hr_norm_sq(const std::vector<double>& field, double x0, double dx, double r,
                        const std::optional<WindowFn>& window) {
    require(!field.empty() && dx > 0.0, "hr_norm needs a nonempty lattice field");
    const std::size_t n = field.size();
    if (window) {
        double lo = window->center1 - window->radius, hi = window->center1 + window->radius;
        require(lo >= x0 - 1e-9 && hi <= x0 + (n - 1) * dx + 1e-9,
                "window support exceeds the lattice");
    }
    std::size_t m = next_pow2(2 * n);
    std::vector<std::complex<double>> a(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = field[j];
        if (window) v *= (*window)(x0 + j * dx);
        a[j] = v;
    }
    fft_radix2(a, false);

    HrNormResult res;
    res.band_edge = kPi / dx;
    res.band_limited = r >= 0.0;
    const double dxi = 2.0 * kPi / (m * dx);
    double sum = 0.0, outer_max = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        // signed frequency of DFT bin k
        double fk = k <= m / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(m);
        double xi = fk * dxi;
        if (std::fabs(xi) > res.band_edge) continue;
        double amp = std::norm(a[k]) * dx * dx;  // |F f(xi)|^2, Riemann-sum transform
        sum += amp * std::pow(1.0 + xi * xi, r) * dxi;
        if (std::fabs(xi) > 0.9 * res.band_edge) outer_max = std::max(outer_max, amp);
    }
    res.value_sq = sum;
    res.tail_bound = outer_max * tail_integral(1, r, res.band_edge);
    return res;
}

HrNormResult hr_norm_sq_2d(const std::vector<double>& field, int npt, double x0, double dx,
                           double r, const std::optional<WindowFn>& window) {
    require(npt > 0 && field.size() == static_cast<std::size_t>(npt) * npt,
            "2d field must be npt x npt");
    std::size_t m = next_pow2(2 * static_cast<std::size_t>(npt));
    std::vector<std::complex<double>> a(m * m, 0.0);
    for (int i = 0; i < npt; ++i)
        for (int j = 0; j < npt; ++j) {
            double v = field[static_cast<std::size_t>(i) * npt + j];
            if (window) v *= (*window)(x0 + i * dx, x0 + j * dx);
            a[i * m + j] = v;
        }
    // row-column FFT
    std::vector<std::complex<double>> tmp(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) tmp[j] = a[i * m + j];
        fft_radix2(tmp, false);
        for (std::size_t j = 0; j < m; ++j) a[i * m + j] = tmp[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) tmp[i] = a[i * m + j];
        fft_radix2(tmp, false);
        for (std::size_t i = 0; i < m; ++i) a[i * m + j] = tmp[i];
    }

    HrNormResult res;
    res.band_edge = kPi / dx;
    res.band_limited = r >= 0.0;
    const double dxi = 2.0 * kPi / (m * dx);
    double sum = 0.0, outer_max = 0.0;
    for (std::size_t ki = 0; ki < m; ++ki) {
        double f1 = ki <= m / 2 ? static_cast<double>(ki) : static_cast<double>(ki) - static_cast<double>(m);
        double xi1 = f1 * dxi;
        if (std::fabs(xi1) > res.band_edge) continue;
        for (std::size_t kj = 0; kj < m; ++kj) {
            double f2 = kj <= m / 2 ? static_cast<double>(kj) : static_cast<double>(kj) - static_cast<double>(m);
            double xi2 = f2 * dxi;
            double rho2 = xi1 * xi1 + xi2 * xi2;
            if (rho2 > res.band_edge * res.band_edge) continue;
            double amp = std::norm(a[ki * m + kj]) * dx * dx * dx * dx;
            sum += amp * std::pow(1.0 + rho2, r) * dxi * dxi;
            if (rho2 > 0.81 * res.band_edge * res.band_edge) outer_max = std::max(outer_max, amp);
        }
    }
    res.value_sq = sum;
    res.tail_bound = outer_max * tail_integral(2, r, res.band_edge);
    return res;
}

MembershipScan delta_membership_scan(double r, int doublings, double first_radius) {
    MembershipScan scan;
    scan.r = r;
    double b = first_radius;
    auto ring = [&](double lo, double hi) {
        return 2.0 * kPi *
               integrate([&](double rho) { return rho * std::pow(1.0 + rho * rho, r); }, lo,
                         hi, 1e-11, 1e-14);
    };
    double acc = ring(0.0, b);
    scan.band_radii.push_back(b);
    scan.partial_integrals.push_back(acc);
    for (int k = 0; k < doublings; ++k) {
        double inc = ring(b, 2.0 * b);
        b *= 2.0;
        acc += inc;
        scan.band_radii.push_back(b);
        scan.partial_integrals.push_back(acc);
        scan.doubling_increments.push_back(inc);
    }
    std::size_t nd = scan.doubling_increments.size();
    scan.last_ratio = scan.doubling_increments[nd - 1] / scan.doubling_increments[nd - 2];
    scan.converges = scan.last_ratio < 0.9;
    return scan;
}

double kernel_increment_sq(int dim, double tau, double h, double r, double band_radius) {
    require(h > 0.0 && tau >= 0.0, "kernel increment needs h > 0, tau >= 0");
    // |F G_{tau+h} - F G_tau|^2 = 4 sin^2(h rho / 2) cos^2((2 tau + h) rho / 2) / rho^2
    auto spectral = [&](double rho) {
        double sh = std::sin(0.5 * h * rho);
        double ch = std::cos(0.5 * (2.0 * tau + h) * rho);
        double num = 4.0 * sh * sh * ch * ch;
        double weight = dim == 1 ? 2.0 : 2.0 * kPi * rho;
        return num / (rho * rho) * std::pow(1.0 + rho * rho, r) * weight;
    };
    int pieces = std::max(16, static_cast<int>((2.0 * tau + 2.0 * h) * band_radius / kPi) + 16);
    return integrate_split(spectral, 1e-12, band_radius, pieces, 1e-9, 1e-13);
}

KernelPathProfile kernel_path_profile(int dim, double t0, double x0, double r,
                                      const std::vector<double>& h_list,
                                      double band_radius) {
    (void)x0;  // phase only; the H^r magnitudes are x0-free
    if (dim == 2) require(r < -1.0, "d=2 kernel paths need r < -1");
    if (dim == 1) require(r < 0.5, "d=1 kernel paths need r < 1/2");
    KernelPathProfile prof;
    prof.dim = dim;
    prof.t0 = t0;
    prof.r = r;
    prof.band_radius = band_radius;
    prof.h = h_list;
    for (double h : h_list) {
        prof.right_increment_sq.push_back(kernel_increment_sq(dim, 0.0, h, r, band_radius));
        prof.left_increment_sq.push_back(0.0);  // F(t0-h) = 0 = left limit
    }
    if (dim == 2) {
        // || delta ||^2 over the band; the pointwise-limit value of G at time 0
        auto f = [&](double rho) { return 2.0 * kPi * rho * std::pow(1.0 + rho * rho, r); };
        prof.jump_sq_at_t0 = integrate(f, 0.0, band_radius, 1e-11, 1e-14);
        prof.jump_tail_bound = tail_integral(2, r, band_radius);
    } else {
        prof.jump_sq_at_t0 = 0.0;  // G_0 = half-indicator of a point, L2-null
        prof.jump_tail_bound = 0.0;
    }
    return prof;
}

std::vector<double> u2_increment_energy_d1(const JumpSet& large,
                                           const std::vector<double>& atom_sigma, int nt,
                                           double dt) {
    require(large.window.dim == 1, "exact increment energy is a d=1 service");
    require(atom_sigma.empty() || atom_sigma.size() == large.atoms.size(),
            "atom sigma weights must match the atom list");
    std::vector<double> profile(static_cast<std::size_t>(nt), 0.0);
    struct Edge {
        double pos;
        double weight;  // signed field change at this breakpoint
    };
    std::vector<Edge> edges;
    for (int k = 0; k < nt; ++k) {
        double ta = k * dt, tb = (k + 1) * dt;
        edges.clear();
        for (std::size_t i = 0; i < large.atoms.size(); ++i) {
            const auto& a = large.atoms[i];
            if (a.t >= tb) break;
            double w = 0.5 * a.z * (atom_sigma.empty() ? 1.0 : atom_sigma[i]);
            double r_out = tb - a.t;            // outer cone radius at t_{k+1}
            double r_in = std::max(ta - a.t, 0.0);  // inner radius at t_k
            // difference field gains +w on the annulus (two intervals, or one
            // symmetric interval when the atom arrived inside this slice)
            if (r_in == 0.0) {
                edges.push_back({a.x[0] - r_out, w});
                edges.push_back({a.x[0] + r_out, -w});
            } else {
                edges.push_back({a.x[0] - r_out, w});
                edges.push_back({a.x[0] - r_in, -w});
                edges.push_back({a.x[0] + r_in, w});
                edges.push_back({a.x[0] + r_out, -w});
            }
        }
        if (edges.empty()) continue;
        std::sort(edges.begin(), edges.end(),
                  [](const Edge& u, const Edge& v) { return u.pos < v.pos; });
        double level = 0.0, energy = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            level += edges[e].weight;
            double len = edges[e + 1].pos - edges[e].pos;
            energy += level * level * len;
        }
        profile[k] = energy;
    }
    return profile;
}

namespace {

std::vector<double> median5(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> out(v.size());
    double w[5];
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j = i - 2; j <= i + 2; ++j)
            w[m++] = v[std::clamp(j, 0, n - 1)];
        std::sort(w, w + 5);
        out[i] = w[2];
    }
    return out;
}

} // namespace

JumpDetection detect_profile_jumps(const std::vector<double>& profile, double dt,
                                   double floor_step) {
    JumpDetection det;
    if (profile.size() < 3) return det;
    std::vector<double> filt = median5(profile);
    const int n = static_cast<int>(filt.size());
    std::vector<double> rises(n, 0.0);
    rises[0] = filt[0];  // the profile starts from an implicit zero baseline
    for (int k = 1; k < n; ++k) rises[k] = filt[k] - filt[k - 1];

    for (int k = 0; k < n; ++k) {
        if (rises[k] <= floor_step) continue;
        // 5x the median of the neighboring rises (scale-free gate)
        double w[9];
        int m = 0;
        for (int j = k - 4; j <= k + 4; ++j)
            if (j >= 0 && j < n && j != k) w[m++] = std::fabs(rises[j]);
        std::sort(w, w + m);
        double med = w[m / 2];
        if (rises[k] <= 5.0 * med) continue;
        // localize on the raw profile: largest sustained rise within +-2
        // slices. Sustained = the elevation persists over the next slices,
        // which transient annulus-crossing blips do not.
        int best = k;
        double best_rise = -kInf;
        for (int j = std::max(0, k - 2); j <= std::min(n - 1, k + 2); ++j) {
            double floor_before = j > 0 ? profile[j - 1] : 0.0;
            double sustained = kInf;
            for (int l = j; l <= std::min(n - 1, j + 2); ++l)
                sustained = std::min(sustained, profile[l]);
            double raw = sustained - floor_before;
            if (raw > best_rise) {
                best_rise = raw;
                best = j;
            }
        }
        if (!det.slices.empty() && det.slices.back() == best) continue;
        det.slices.push_back(best);
        det.times.push_back(best * dt);
        det.steps.push_back(rises[k]);
    }
    return det;
}

IncrementStats fit_increment_exponent(const std::vector<double>& h_list,
                                      const std::vector<std::vector<double>>& product_samples,
                                      const std::vector<std::vector<double>>& forward_samples,
                                      std::uint64_t bootstrap_seed, int bootstrap_rounds) {
    require(product_samples.size() == h_list.size(), "one sample vector per h");
    IncrementStats st;
    st.h = h_list;
    st.replicates = product_samples.empty() ? 0 : static_cast<int>(product_samples[0].size());
    if (st.replicates < 30)
        throw statistics_error("increment statistics need at least 30 replicates");

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        st.mean_product.push_back(mean_of(product_samples[i]));
        if (i < forward_samples.size()) st.mean_forward.push_back(mean_of(forward_samples[i]));
    }
    if (*std::max_element(st.mean_product.begin(), st.mean_product.end()) <= 0.0) {
        st.degenerate = true;
        return st;
    }

    auto fit_slope = [&](const std::vector<double>& means) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < h_list.size(); ++i) {
            if (means[i] <= 0.0) continue;
            double x = std::log(h_list[i]), y = std::log(means[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++n;
        }
        require(n >= 2, "need two usable h points for a slope");
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    st.slope = fit_slope(st.mean_product);

    // percentile bootstrap over replicates
    Rng rng = Rng(bootstrap_seed).substream("bootstrap");
    std::vector<double> slopes;
    slopes.reserve(bootstrap_rounds);
    std::vector<double> means(h_list.size());
    for (int b = 0; b < bootstrap_rounds; ++b) {
        std::vector<int> pick(st.replicates);
        for (int i = 0; i < st.replicates; ++i)
            pick[i] = static_cast<int>(rng.uniform() * st.replicates);
        for (std::size_t i = 0; i < h_list.size(); ++i) {
            double s = 0.0;
            for (int rep : pick) s += product_samples[i][rep];
            means[i] = s / st.replicates;
        }
        bool ok = true;
        for (double mv : means)
            if (mv <= 0.0) ok = false;
        if (ok) slopes.push_back(fit_slope(means));
    }
    if (slopes.size() >= 40) {
        std::sort(slopes.begin(), slopes.end());
        st.ci_lo = slopes[static_cast<std::size_t>(0.025 * slopes.size())];
        st.ci_hi = slopes[static_cast<std::size_t>(0.975 * (slopes.size() - 1))];
    } else {
        st.ci_lo = st.slope;
        st.ci_hi = st.slope;
    }
    return st;
}

} // namespace levywave
