#include "levywave/solver.hpp"

#include <algorithm>
#include <cmath>

#include "levywave/quadrature.hpp"

namespace levywave {

InitialData InitialData::registry(const std::string& name) {
    InitialData d;
    d.name = name;
    if (name == "zero") {
        d.u0 = [](double, double) { return 0.0; };
        d.v0 = [](double, double) { return 0.0; };
        d.grad_u0 = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
        d.u0_l1 = d.v0_l1 = true;
        d.fourier_decay_c = 0.0;
    } else if (name == "constant-one") {
        d.u0 = [](double, double) { return 1.0; };
        d.v0 = [](double, double) { return 0.0; };
        d.grad_u0 = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    } else if (name == "linear-time") {
        d.u0 = [](double, double) { return 0.0; };
        d.v0 = [](double, double) { return 1.0; };
        d.grad_u0 = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    } else if (name == "sine") {
        d.u0 = [](double x, double) { return std::sin(x); };
        d.v0 = [](double, double) { return 0.0; };
        d.grad_u0 = [](double x, double) { return std::array<double, 2>{std::cos(x), 0.0}; };
    } else if (name == "bump") {
        d.u0 = [](double x, double y) { return std::exp(-(x * x + y * y)); };
        d.v0 = [](double, double) { return 0.0; };
        d.grad_u0 = [](double x, double y) {
            double g = std::exp(-(x * x + y * y));
            return std::array<double, 2>{-2.0 * x * g, -2.0 * y * g};
        };
        d.q0 = 3.0;
        d.u0_l1 = d.v0_l1 = true;
        d.fourier_decay_c = 2.0;  // gaussian spectrum decays faster than 1/(1+xi^2)
    } else {
        throw std::invalid_argument("unknown initial data '" + name + "'");
    }
    return d;
}

SigmaFn SigmaFn::registry(const std::string& name) {
    SigmaFn s;
    s.name = name;
    if (name == "zero") {
        s.fn = [](double) { return 0.0; };
        s.lipschitz = 0.0;
        s.bounded = true;
        s.bound = 0.0;
    } else if (name == "constant") {
        s.fn = [](double) { return 1.0; };
        s.lipschitz = 0.0;
        s.bounded = true;
        s.bound = 1.0;
    } else if (name == "linear") {
        s.fn = [](double u) { return u; };
        s.lipschitz = 1.0;
        s.bounded = false;
        s.bound = kInf;
    } else if (name == "bounded-saturating") {
        s.fn = [](double u) { return std::tanh(u); };
        s.lipschitz = 1.0;
        s.bounded = true;
        s.bound = 1.0;
    } else {
        throw std::invalid_argument("unknown sigma '" + name + "'");
    }
    return s;
}

double homogeneous_wave(const InitialData& init, int dim, double t, double x1, double x2) {
    if (t == 0.0) return init.u0(x1, x2);
    require(t > 0.0, "homogeneous wave needs t >= 0");
    if (dim == 1) {
        double travel = 0.5 * (init.u0(x1 + t, 0.0) + init.u0(x1 - t, 0.0));
        double rest = 0.5 * integrate([&](double y) { return init.v0(y, 0.0); }, x1 - t,
                                      x1 + t, 1e-11, 1e-14);
        return travel + rest;
    }
    // (G_t * v0)(x) + d/dt (G_t * u0)(x), |y| = t sin(theta) substitution
    auto angular = [&](double phi) {
        double c = std::cos(phi), s = std::sin(phi);
        return integrate(
            [&](double theta) {
                double sn = std::sin(theta);
                double px = x1 - t * sn * c, py = x2 - t * sn * s;
                double v_term = t * sn * init.v0(px, py);
                auto g = init.grad_u0(px, py);
                double u_term = sn * (init.u0(px, py) - t * sn * (c * g[0] + s * g[1]));
                return v_term + u_term;
            },
            0.0, 0.5 * kPi, 1e-9, 1e-12);
    };
    double total = 0.0;
    for (int seg = 0; seg < 4; ++seg)
        total += integrate(angular, 0.5 * kPi * seg, 0.5 * kPi * (seg + 1), 1e-9, 1e-12);
    return total / (2.0 * kPi);
}

namespace {

struct AtomCtx {
    double t = 0, z = 0;
    double q1 = 0, q2 = 0;  // X / dx, exact when dx is a binary rational
    int k_prev = 0;         // latest slice strictly before the atom time
};

/// index/fraction split that never mixes the box radius into the floating
/// arithmetic, so nested boxes interpolate identically
inline void split_index(double q, int r_over_dx, int nmax, int& j, double& f) {
    double fl = std::floor(q);
    f = q - fl;
    j = static_cast<int>(fl) + r_over_dx;
    if (j < 0) { j = 0; f = 0.0; }
    if (j >= nmax) { j = nmax - 1; f = 1.0; }
}

class Convolver {
public:
    Convolver(const NoiseRealization& noise, const Grid& grid)
        : noise_(noise), grid_(grid), lat_(noise.small.lattice) {
        require(grid.dim == noise.spec.window.dim, "grid and noise dimensions differ");
        require(std::fabs(grid.radius - noise.spec.window.radius) < 1e-12,
                "grid and noise boxes differ");
        require(std::fabs(grid.dt - noise.spec.dt) < 1e-15 &&
                    std::fabs(grid.dx - noise.spec.dx) < 1e-15,
                "grid and noise lattices differ");
        require(grid.horizon <= noise.spec.window.horizon + 1e-12,
                "noise realization does not cover the grid horizon");
        r_over_dx_ = static_cast<int>(std::round(grid.radius / grid.dx));
        dt_over_dx_ = grid.dt / grid.dx;
        compensated_ = noise.with_drift;

        for (const auto& a : noise.large.atoms) {
            AtomCtx c;
            c.t = a.t;
            c.z = a.z;
            c.q1 = a.x[0] / grid.dx;
            c.q2 = a.x[1] / grid.dx;
            c.k_prev = std::max(0, static_cast<int>(std::ceil(a.t / grid.dt)) - 1);
            atoms_.push_back(c);
        }
        // effective cell increments for the current decomposition mode
        cell_rows_.assign(lat_.nt, std::vector<double>(static_cast<std::size_t>(lat_.nx) * lat_.ny));
        for (int c = 0; c < lat_.nt; ++c)
            for (int ix = 0; ix < lat_.nx; ++ix)
                for (int iy = 0; iy < lat_.ny; ++iy)
                    cell_rows_[c][static_cast<std::size_t>(ix) * lat_.ny + iy] =
                        noise.small.increment(c, ix, iy, compensated_);
    }

    int r_over_dx() const { return r_over_dx_; }

    /// sigma(u(T_i-, X_i)) for every large atom, interpolating the previous slice
    std::vector<double> atom_sigma(const std::vector<std::vector<double>>& u,
                                   const SigmaFn& sigma) const {
        std::vector<double> out(atoms_.size());
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            out[i] = sigma(interp(u[atoms_[i].k_prev], atoms_[i].q1, atoms_[i].q2));
        return out;
    }

    /// sigma at the cell midpoints, from slice c (the latest slice before the
    /// cell's time midpoint), as the predictability convention requires
    std::vector<std::vector<double>> cell_sigma(const std::vector<std::vector<double>>& u,
                                                const SigmaFn& sigma) const {
        std::vector<std::vector<double>> rows(lat_.nt);
        const int npt = grid_.nx() + 1;
        for (int c = 0; c < lat_.nt; ++c) {
            auto& row = rows[c];
            row.resize(static_cast<std::size_t>(lat_.nx) * lat_.ny);
            const auto& slice = u[std::min(c, grid_.nt())];
            for (int ix = 0; ix < lat_.nx; ++ix) {
                for (int iy = 0; iy < lat_.ny; ++iy) {
                    double mid;
                    if (grid_.dim == 1) {
                        mid = 0.5 * (slice[ix] + slice[ix + 1]);
                    } else {
                        std::size_t a = static_cast<std::size_t>(ix) * npt + iy;
                        mid = 0.25 * (slice[a] + slice[a + 1] + slice[a + npt] + slice[a + npt + 1]);
                    }
                    row[static_cast<std::size_t>(ix) * lat_.ny + iy] = sigma(mid);
                }
            }
        }
        return rows;
    }

    /// large-jump part of snapshot k (adds into out)
    void add_large(int k, const std::vector<double>& atom_sig, std::vector<double>& out) const {
        const double tk = grid_.t_of(k);
        const int npt = grid_.nx() + 1;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const AtomCtx& a = atoms_[i];
            if (a.t >= tk) break;  // sorted by time; zero kernel at equality
            const double span = tk - a.t;
            const double weight = atom_sig[i] * a.z;
            if (weight == 0.0) continue;
            if (grid_.dim == 1) {
                for (int j = 0; j < npt; ++j) {
                    double dist = (j - r_over_dx_ - a.q1) * grid_.dx;
                    double g = eval_kernel(1, span, dist);
                    if (g != 0.0) out[j] += g * weight;
                }
            } else {
                for (int jx = 0; jx < npt; ++jx) {
                    double dx1 = (jx - r_over_dx_ - a.q1) * grid_.dx;
                    if (std::fabs(dx1) >= span) continue;
                    for (int jy = 0; jy < npt; ++jy) {
                        double dx2 = (jy - r_over_dx_ - a.q2) * grid_.dx;
                        double g = eval_kernel(2, span, std::hypot(dx1, dx2));
                        if (g != 0.0) out[static_cast<std::size_t>(jx) * npt + jy] += g * weight;
                    }
                }
            }
        }
    }

    /// cell-sum part of snapshot k: sum over cells of
    /// G_{t_k - s_c}(x - y_c) * rows[c][cell] * scale[c]. Serves both the
    /// small-jump part (rows = sigma * dL) and the drift part
    /// (rows = sigma, scale = b dt dx^d).
    void add_cells(int k, const std::vector<std::vector<double>>& rows, double scale,
                   std::vector<double>& out) const {
        const int npt = grid_.nx() + 1;
        const int cmax = std::min(k, lat_.nt);  // cells with s_c < t_k
        if (grid_.dim == 1) {
            for (int c = 0; c < cmax; ++c) {
                double ratio = (k - c - 0.5) * dt_over_dx_;  // cone half-width in cells
                const double* row = rows[c].data();
                for (int j = 0; j < npt; ++j) {
                    int mlo = static_cast<int>(std::floor(j - 0.5 - ratio)) + 1;
                    int mhi = static_cast<int>(std::ceil(j - 0.5 + ratio)) - 1;
                    if (mlo < 0) mlo = 0;
                    if (mhi >= lat_.nx) mhi = lat_.nx - 1;
                    double s = 0.0;
                    for (int m = mlo; m <= mhi; ++m) s += row[m];
                    out[j] += 0.5 * scale * s;
                }
            }
        } else {
            for (int c = 0; c < cmax; ++c) {
                const double span = (k - c - 0.5) * grid_.dt;
                const double ratio = (k - c - 0.5) * dt_over_dx_;
                const double* row = rows[c].data();
                for (int jx = 0; jx < npt; ++jx) {
                    int mxlo = std::max(0, static_cast<int>(std::floor(jx - 0.5 - ratio)) + 1);
                    int mxhi = std::min(lat_.nx - 1,
                                        static_cast<int>(std::ceil(jx - 0.5 + ratio)) - 1);
                    for (int jy = 0; jy < npt; ++jy) {
                        int mylo = std::max(0, static_cast<int>(std::floor(jy - 0.5 - ratio)) + 1);
                        int myhi = std::min(lat_.ny - 1,
                                            static_cast<int>(std::ceil(jy - 0.5 + ratio)) - 1);
                        double s = 0.0;
                        for (int mx = mxlo; mx <= mxhi; ++mx) {
                            double d1 = (jx - mx - 0.5) * grid_.dx;
                            const double* rr = row + static_cast<std::size_t>(mx) * lat_.ny;
                            for (int my = mylo; my <= myhi; ++my) {
                                double d2 = (jy - my - 0.5) * grid_.dx;
                                double r2 = d1 * d1 + d2 * d2;
                                double h2 = span * span - r2;
                                if (h2 > 0.0) s += rr[my] / std::sqrt(h2);
                            }
                        }
                        out[static_cast<std::size_t>(jx) * npt + jy] += scale / (2.0 * kPi) * s;
                    }
                }
            }
        }
    }

    const std::vector<std::vector<double>>& raw_cell_rows() const { return cell_rows_; }
    const std::vector<AtomCtx>& atoms() const { return atoms_; }

    /// per-cell product sigma * dL for the small-jump pass
    std::vector<std::vector<double>> weighted_rows(
        const std::vector<std::vector<double>>& sig_rows) const {
        std::vector<std::vector<double>> rows(cell_rows_.size());
        for (std::size_t c = 0; c < cell_rows_.size(); ++c) {
            rows[c].resize(cell_rows_[c].size());
            for (std::size_t m = 0; m < cell_rows_[c].size(); ++m)
                rows[c][m] = sig_rows[c][m] * cell_rows_[c][m];
        }
        return rows;
    }

private:
    double interp(const std::vector<double>& slice, double q1, double q2) const {
        const int npt = grid_.nx() + 1;
        int j1;
        double f1;
        split_index(q1, r_over_dx_, npt - 1, j1, f1);
        if (grid_.dim == 1) return (1.0 - f1) * slice[j1] + f1 * slice[j1 + 1];
        int j2;
        double f2;
        split_index(q2, r_over_dx_, npt - 1, j2, f2);
        std::size_t a = static_cast<std::size_t>(j1) * npt + j2;
        return (1.0 - f1) * ((1.0 - f2) * slice[a] + f2 * slice[a + 1]) +
               f1 * ((1.0 - f2) * slice[a + npt] + f2 * slice[a + npt + 1]);
    }

    const NoiseRealization& noise_;
    Grid grid_;
    CellLattice lat_;
    std::vector<AtomCtx> atoms_;
    std::vector<std::vector<double>> cell_rows_;
    int r_over_dx_ = 0;
    double dt_over_dx_ = 0.0;
    bool compensated_ = true;
};

} // namespace

double stochastic_convolution(const NoiseRealization& noise, const Grid& grid,
                              const ConvolutionWeights& weights, double t, double x1,
                              double x2) {
    if (t < 0.0 || t > noise.spec.window.horizon + 1e-12)
        throw coverage_error("time " + std::to_string(t) + " outside the noise window");
    if (std::fabs(x1) > noise.spec.window.radius + 1e-12 ||
        (grid.dim == 2 && std::fabs(x2) > noise.spec.window.radius + 1e-12))
        throw coverage_error("point outside the noise window");

    double total = 0.0;
    // large-jump atoms
    for (std::size_t i = 0; i < noise.large.atoms.size(); ++i) {
        const auto& a = noise.large.atoms[i];
        if (a.t >= t) break;
        double sig = weights.atom_sigma.empty() ? 1.0 : weights.atom_sigma[i];
        double dist = grid.dim == 1 ? std::fabs(x1 - a.x[0])
                                    : std::hypot(x1 - a.x[0], x2 - a.x[1]);
        total += eval_kernel(grid.dim, t - a.t, dist) * sig * a.z;
    }
    // small-jump cells
    const CellLattice& lat = noise.small.lattice;
    for (int c = 0; c < lat.nt; ++c) {
        double span = t - lat.t_mid(c);
        if (span <= 0.0) break;
        for (int ix = 0; ix < lat.nx; ++ix) {
            double d1 = x1 - lat.x_mid(ix, noise.spec.window.radius);
            if (std::fabs(d1) >= span) continue;
            for (int iy = 0; iy < lat.ny; ++iy) {
                double dist = d1;
                if (grid.dim == 2) {
                    double d2 = x2 - lat.x_mid(iy, noise.spec.window.radius);
                    dist = std::hypot(d1, d2);
                }
                double g = eval_kernel(grid.dim, span, dist);
                if (g == 0.0) continue;
                double sig = weights.cell_sigma.empty()
                                 ? 1.0
                                 : weights.cell_sigma[lat.index(c, ix, iy)];
                total += g * sig * noise.small.increment(c, ix, iy, noise.with_drift);
            }
        }
    }
    // drift part
    double b = noise.drift();
    if (b != 0.0) {
        double vol = lat.cell_volume(grid.dim);
        for (int c = 0; c < lat.nt; ++c) {
            double span = t - lat.t_mid(c);
            if (span <= 0.0) break;
            for (int ix = 0; ix < lat.nx; ++ix)
                for (int iy = 0; iy < lat.ny; ++iy) {
                    double d1 = x1 - lat.x_mid(ix, noise.spec.window.radius);
                    double dist = grid.dim == 1
                                      ? d1
                                      : std::hypot(d1, x2 - lat.x_mid(iy, noise.spec.window.radius));
                    double g = eval_kernel(grid.dim, span, dist);
                    if (g == 0.0) continue;
                    double sig = weights.cell_sigma.empty()
                                     ? 1.0
                                     : weights.cell_sigma[lat.index(c, ix, iy)];
                    total += b * g * sig * vol;
                }
        }
    }
    return total;
}

SolutionPath picard_solve(const InitialData& init, const SigmaFn& sigma,
                          const NoiseRealization& noise, const Grid& grid,
                          const PicardOptions& opts) {
    const int nt = grid.nt();
    const std::size_t pps = grid.points_per_slice();
    const int npt = grid.nx() + 1;

    SolutionPath path;
    path.grid = grid;
    path.level = noise.spec.trunc.level;
    path.tau = noise.tau;

    // deterministic wave part
    path.w.assign(nt + 1, std::vector<double>(pps, 0.0));
    for (int k = 0; k <= nt; ++k) {
        double tk = grid.t_of(k);
        for (int jx = 0; jx < npt; ++jx) {
            if (grid.dim == 1) {
                path.w[k][jx] = homogeneous_wave(init, 1, tk, grid.x_of(jx));
            } else {
                for (int jy = 0; jy < npt; ++jy)
                    path.w[k][grid.sindex(jx, jy)] =
                        homogeneous_wave(init, 2, tk, grid.x_of(jx), grid.x_of(jy));
            }
        }
    }

    Convolver conv(noise, grid);
    const double drift = noise.drift();
    const double drift_scale = drift * (grid.dim == 1 ? grid.dt * grid.dx
                                                      : grid.dt * grid.dx * grid.dx);

    std::vector<std::vector<double>> u_prev = path.w;
    path.u = path.w;
    path.u1.assign(nt + 1, std::vector<double>(pps, 0.0));
    path.u2.assign(nt + 1, std::vector<double>(pps, 0.0));
    path.u3.assign(nt + 1, std::vector<double>(pps, 0.0));

    for (int it = 1; it <= opts.max_iters; ++it) {
        std::vector<double> atom_sig = conv.atom_sigma(u_prev, sigma);
        std::vector<std::vector<double>> sig_rows = conv.cell_sigma(u_prev, sigma);
        std::vector<std::vector<double>> small_rows = conv.weighted_rows(sig_rows);

        double dist = 0.0;
        for (int k = 0; k <= nt; ++k) {
            std::vector<double>& u1 = path.u1[k];
            std::vector<double>& u2 = path.u2[k];
            std::vector<double>& u3 = path.u3[k];
            std::fill(u1.begin(), u1.end(), 0.0);
            std::fill(u2.begin(), u2.end(), 0.0);
            std::fill(u3.begin(), u3.end(), 0.0);
            conv.add_cells(k, small_rows, 1.0, u1);
            conv.add_large(k, atom_sig, u2);
            if (drift_scale != 0.0) conv.add_cells(k, sig_rows, drift_scale, u3);
            for (std::size_t j = 0; j < pps; ++j) {
                double v = path.w[k][j] + u1[j] + u2[j] + u3[j];
                dist = std::max(dist, std::fabs(v - path.u[k][j]));
                path.u[k][j] = v;
            }
        }
        path.distances.push_back(dist);
        path.iterations = it;
        if (dist >= opts.tol) path.effective_iterations = it;
        u_prev = path.u;
        if (!opts.force_full_iters && dist < opts.tol) {
            path.converged = true;
            break;
        }
    }
    if (opts.force_full_iters)
        path.converged = !path.distances.empty() && path.distances.back() < opts.tol;
    return path;
}

SolutionPath patch_solution(const std::vector<SolutionPath>& paths) {
    require(!paths.empty(), "patch_solution needs at least one path");
    for (std::size_t i = 1; i < paths.size(); ++i)
        require(paths[i].level > paths[i - 1].level, "paths must come in increasing N order");

    SolutionPath out = paths.front();
    out.source_level.assign(out.grid.nt() + 1, -1);
    for (int k = 0; k <= out.grid.nt(); ++k) {
        double tk = out.grid.t_of(k);
        const SolutionPath* src = nullptr;
        for (const auto& p : paths) {
            if (tk <= p.tau) {
                src = &p;
                break;
            }
        }
        if (!src)
            throw coverage_error(
                "no truncation level covers t = " + std::to_string(tk) +
                "; enlarge the maximum N (all tau_N are below this time)");
        out.w[k] = src->w[k];
        out.u1[k] = src->u1[k];
        out.u2[k] = src->u2[k];
        out.u3[k] = src->u3[k];
        out.u[k] = src->u[k];
        out.source_level[k] = src->level;
    }
    out.tau = paths.back().tau;
    out.level = paths.back().level;
    return out;
}

std::vector<std::vector<double>> small_jump_snapshots(const NoiseRealization& noise,
                                                      const Grid& grid,
                                                      const std::vector<double>& times) {
    Convolver conv(noise, grid);
    const CellLattice& lat = noise.small.lattice;
    const int npt = grid.nx() + 1;
    const auto& rows = conv.raw_cell_rows();
    std::vector<std::vector<double>> out(times.size(),
                                         std::vector<double>(grid.points_per_slice(), 0.0));
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        double t = times[ti];
        require(t >= 0.0 && t <= noise.spec.window.horizon + 1e-12,
                "snapshot time outside the noise window");
        auto& field = out[ti];
        for (int c = 0; c < lat.nt; ++c) {
            double span = t - lat.t_mid(c);
            if (span <= 0.0) break;
            const double ratio = span / grid.dx;
            const double* row = rows[c].data();
            for (int jx = 0; jx < npt; ++jx) {
                int mxlo = std::max(0, static_cast<int>(std::floor(jx - 0.5 - ratio)) + 1);
                int mxhi = std::min(lat.nx - 1, static_cast<int>(std::ceil(jx - 0.5 + ratio)) - 1);
                if (grid.dim == 1) {
                    double s = 0.0;
                    for (int m = mxlo; m <= mxhi; ++m) s += row[m];
                    field[jx] += 0.5 * s;
                } else {
                    for (int jy = 0; jy < npt; ++jy) {
                        int mylo = std::max(0, static_cast<int>(std::floor(jy - 0.5 - ratio)) + 1);
                        int myhi =
                            std::min(lat.ny - 1, static_cast<int>(std::ceil(jy - 0.5 + ratio)) - 1);
                        double s = 0.0;
                        for (int mx = mxlo; mx <= mxhi; ++mx) {
                            double d1 = (jx - mx - 0.5) * grid.dx;
                            const double* rr = row + static_cast<std::size_t>(mx) * lat.ny;
                            for (int my = mylo; my <= myhi; ++my) {
                                double d2 = (jy - my - 0.5) * grid.dx;
                                double h2 = span * span - d1 * d1 - d2 * d2;
                                if (h2 > 0.0) s += rr[my] / std::sqrt(h2);
                            }
                        }
                        field[static_cast<std::size_t>(jx) * npt + jy] += s / (2.0 * kPi);
                    }
                }
            }
        }
    }
    return out;
}

} // namespace levywave
