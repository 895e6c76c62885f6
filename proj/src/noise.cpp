#include "levywave/noise.hpp"

#include <algorithm>
#include <cmath>

#include "levywave/quadrature.hpp"
#include "levywave/rng.hpp"

namespace levywave {

CellLattice CellLattice::from_window(const SimWindow& w, double dt, double dx) {
    require(dt > 0.0 && dx > 0.0, "cell lattice needs dt > 0 and dx > 0");
    CellLattice lat;
    lat.dt = dt;
    lat.dx = dx;
    double nt = w.horizon / dt, nx = 2.0 * w.radius / dx;
    require(std::fabs(nt - std::round(nt)) < 1e-9, "T must be a multiple of dt");
    require(std::fabs(nx - std::round(nx)) < 1e-9, "2R must be a multiple of dx");
    lat.nt = static_cast<int>(std::round(nt));
    lat.nx = static_cast<int>(std::round(nx));
    lat.ny = w.dim == 2 ? lat.nx : 1;
    return lat;
}

namespace {

JumpAtom sample_uniform_position(const SimWindow& w, Rng& rng) {
    JumpAtom a;
    a.t = rng.uniform(0.0, w.horizon);
    a.x[0] = rng.uniform(-w.radius, w.radius);
    a.x[1] = w.dim == 2 ? rng.uniform(-w.radius, w.radius) : 0.0;
    return a;
}

} // namespace

JumpSet sample_base_large_jumps(const LevyMeasure& measure, const SimWindow& window,
                                std::uint64_t seed) {
    Rng rng = Rng(seed).substream("large-jumps");
    JumpSet js;
    js.window = window;
    js.band = JumpBand::Large;
    js.seed = seed;
    const double intensity = measure.tail(1.0) * window.volume();
    const std::uint64_t n = rng.poisson(intensity);
    js.atoms.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        JumpAtom a = sample_uniform_position(window, rng);
        a.z = measure.sample_tail_mark(1.0, rng);
        js.atoms.push_back(a);
    }
    js.sort_by_time();
    return js;
}

JumpSet filter_large_at_level(const JumpSet& base, const TruncationSpec& trunc) {
    JumpSet out;
    out.window = base.window;
    out.band = JumpBand::Large;
    out.seed = base.seed;
    for (const auto& a : base.atoms)
        if (std::fabs(a.z) <= trunc.cap(a.dist())) out.atoms.push_back(a);
    return out;
}

JumpSet filter_overflow_at_level(const JumpSet& base, const TruncationSpec& trunc) {
    JumpSet out;
    out.window = base.window;
    out.band = JumpBand::Overflow;
    out.seed = base.seed;
    for (const auto& a : base.atoms)
        if (std::fabs(a.z) > trunc.cap(a.dist())) out.atoms.push_back(a);
    return out;
}

JumpSet sample_large_jumps(const LevyMeasure& measure, const SimWindow& window,
                           const TruncationSpec& trunc, std::uint64_t seed) {
    require(std::isfinite(measure.tail(1.0)), "large-jump band needs nu(|z|>1) < infinity");
    return filter_large_at_level(sample_base_large_jumps(measure, window, seed), trunc);
}

namespace {

/// Numeric inverse of the radial location CDF for the outside-overflow
/// process. density g(s) proportional to tail(cap(s)) (d=1, one side) or
/// tail(cap(s)) * s (d=2 radial), on s > R.
class OutsideLocationSampler {
public:
    OutsideLocationSampler(const LevyMeasure& m, const TruncationSpec& trunc, double R,
                           int dim)
        : measure_(m), trunc_(trunc), radius_(R), dim_(dim) {
        auto g = [&](double s) { return density(s); };
        // cumulative mass on transformed grid s = R + w/(1-w)
        const int n = 512;
        cdf_.resize(n + 1, 0.0);
        nodes_.resize(n + 1, radius_);
        double prev = radius_;
        for (int i = 1; i <= n; ++i) {
            double w = static_cast<double>(i) / (n + 1);
            double s = radius_ + w / (1.0 - w);
            nodes_[i] = s;
            cdf_[i] = cdf_[i - 1] + integrate(g, prev, s, 1e-10, 1e-14);
            prev = s;
        }
        tail_mass_ = integrate_half_line(g, prev, 1e-10);
        total_ = cdf_[n] + tail_mass_;
        require(std::isfinite(total_) && total_ > 0.0,
                "outside-overflow intensity must be finite (needs eta*alpha > d)");
    }

    double total_rate() const { return total_; }

    double sample(Rng& rng) const {
        double target = rng.uniform() * total_;
        if (target >= cdf_.back()) {
            // far tail: inverse by bisection on the half-line transform
            double lo = nodes_.back(), hi = nodes_.back() * 2 + 1;
            auto g = [&](double s) { return density(s); };
            while (cdf_.back() + integrate(g, nodes_.back(), hi, 1e-9, 1e-13) < target)
                hi = hi * 2 + 1;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double c = cdf_.back() + integrate(g, nodes_.back(), mid, 1e-9, 1e-13);
                if (c < target) lo = mid; else hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        if (i == 0) i = 1;
        double frac = (target - cdf_[i - 1]) / std::max(cdf_[i] - cdf_[i - 1], 1e-300);
        return nodes_[i - 1] + frac * (nodes_[i] - nodes_[i - 1]);
    }

    double density(double s) const {
        double lam = measure_.tail(trunc_.cap(s));
        return dim_ == 1 ? lam : 2.0 * kPi * s * lam;
    }

private:
    const LevyMeasure& measure_;
    TruncationSpec trunc_;
    double radius_, total_ = 0, tail_mass_ = 0;
    int dim_;
    std::vector<double> cdf_, nodes_;
};

} // namespace

JumpSet sample_outside_overflow(const LevyMeasure& measure, const SimWindow& window,
                                const TruncationSpec& trunc, std::uint64_t seed) {
    if (trunc.eta * measure.tail_exponent() <= window.dim)
        throw divergence_error(
            "outside-overflow intensity diverges: need eta * alpha > d");
    Rng rng = Rng(seed).substream("overflow-outside");
    JumpSet js;
    js.window = window;  // nominal; atoms lie outside the spatial box
    js.band = JumpBand::Overflow;
    js.seed = seed;

    OutsideLocationSampler loc(measure, trunc, window.radius, window.dim);
    double rate = loc.total_rate() * window.horizon;
    if (window.dim == 1) rate *= 2.0;  // two half-lines
    std::uint64_t n = rng.poisson(rate);
    js.atoms.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        JumpAtom a;
        a.t = rng.uniform(0.0, window.horizon);
        double s = loc.sample(rng);
        if (window.dim == 1) {
            a.x[0] = rng.uniform() < 0.5 ? s : -s;
        } else {
            double phi = rng.uniform(0.0, 2.0 * kPi);
            a.x[0] = s * std::cos(phi);
            a.x[1] = s * std::sin(phi);
            // radial sampling covers |x| > R; reject points inside the square box
            if (std::fabs(a.x[0]) <= window.radius && std::fabs(a.x[1]) <= window.radius)
                continue;
        }
        a.z = measure.sample_tail_mark(trunc.cap(a.dist()), rng);
        js.atoms.push_back(a);
    }
    js.sort_by_time();
    return js;
}

JumpSet merge_sorted(const JumpSet& a, const JumpSet& b, JumpBand band) {
    JumpSet out;
    out.window = a.window;
    out.band = band;
    out.seed = a.seed;
    out.atoms.reserve(a.atoms.size() + b.atoms.size());
    std::merge(a.atoms.begin(), a.atoms.end(), b.atoms.begin(), b.atoms.end(),
               std::back_inserter(out.atoms),
               [](const JumpAtom& u, const JumpAtom& v) { return u.t < v.t; });
    return out;
}

SmallJumpField sample_small_jump_increments(const LevyMeasure& measure,
                                            const SimWindow& window,
                                            const CellLattice& lattice, double epsilon,
                                            std::uint64_t seed, bool gaussian_correction) {
    require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0,1]");
    Rng rng = Rng(seed).substream("small-jumps");
    SmallJumpField f;
    f.epsilon = epsilon;
    f.lattice = lattice;
    f.atoms.window = window;
    f.atoms.band = JumpBand::Small;
    f.atoms.seed = seed;
    f.cell_sums.assign(static_cast<std::size_t>(lattice.cell_count()), 0.0);
    if (epsilon < 1.0) {
        f.compensator_rate = measure.signed_moment_band(epsilon, 1.0);
        const double intensity = measure.band_mass(epsilon, 1.0) * window.volume();
        const std::uint64_t n = rng.poisson(intensity);
        f.atoms.atoms.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            JumpAtom a = sample_uniform_position(window, rng);
            a.z = measure.sample_band_mark(epsilon, 1.0, rng);
            f.atoms.atoms.push_back(a);
        }
        f.atoms.sort_by_time();
        for (const auto& a : f.atoms.atoms) {
            int kt = std::min(lattice.nt - 1, static_cast<int>(a.t / lattice.dt));
            int ix = std::min(lattice.nx - 1,
                              static_cast<int>((a.x[0] + window.radius) / lattice.dx));
            int iy = window.dim == 2
                         ? std::min(lattice.ny - 1,
                                    static_cast<int>((a.x[1] + window.radius) / lattice.dx))
                         : 0;
            f.cell_sums[lattice.index(kt, ix, iy)] += a.z;
        }
    }
    if (gaussian_correction && epsilon > 0.0) {
        // opt-in: Gaussian with the variance of the discarded band |z| <= eps
        Rng grng = Rng(seed).substream("small-jumps-gaussian");
        double var_rate = measure.abs_moment_band(2.0, 0.0, epsilon);
        double sd = std::sqrt(var_rate * lattice.cell_volume(window.dim));
        f.gaussian_correction.assign(f.cell_sums.size(), 0.0);
        for (auto& g : f.gaussian_correction) g = sd * grng.normal();
    }
    return f;
}

double exceedance_rate(const LevyMeasure& measure, const TruncationSpec& trunc, int dim,
                       double domain_radius) {
    require(dim == 1 || dim == 2, "dimension must be 1 or 2");
    auto lam = [&](double s) { return measure.tail(trunc.cap(s)); };
    if (std::isinf(domain_radius)) {
        if (trunc.eta * measure.tail_exponent() <= dim)
            throw divergence_error(
                "exceedance rate diverges on the whole space: need eta * alpha > d");
        if (dim == 1) return 2.0 * integrate_half_line(lam, 0.0, 1e-10);
        double v = 2.0 * kPi *
                   integrate_half_line([&](double s) { return s * lam(s); }, 0.0, 1e-10);
        if (!std::isfinite(v)) throw divergence_error("exceedance rate diverges");
        return v;
    }
    if (dim == 1) return 2.0 * integrate(lam, 0.0, domain_radius, 1e-11, 1e-15);
    // square box [-R,R]^2
    auto inner = [&](double x) {
        return integrate([&](double y) { return lam(std::hypot(x, y)); }, 0.0, domain_radius,
                         1e-9, 1e-13);
    };
    return 4.0 * integrate(inner, 0.0, domain_radius, 1e-9, 1e-13);
}

double stopping_time(const JumpSet& overflow, double T) {
    for (const auto& a : overflow.atoms)
        if (a.t <= T) return a.t;
    return kInf;
}

NoiseRealization sample_noise(const NoiseSpec& spec, std::uint64_t seed) {
    NoiseRealization nr;
    nr.spec = spec;
    nr.seed = seed;
    nr.with_drift = !spec.assumption.no_drift_mode();
    nr.base_large = sample_base_large_jumps(spec.measure, spec.window, seed);
    nr.large = filter_large_at_level(nr.base_large, spec.trunc);
    JumpSet in_box = filter_overflow_at_level(nr.base_large, spec.trunc);
    if (spec.outside_overflow) {
        JumpSet outside = sample_outside_overflow(spec.measure, spec.window, spec.trunc, seed);
        nr.overflow = merge_sorted(in_box, outside, JumpBand::Overflow);
    } else {
        nr.overflow = in_box;
    }
    CellLattice lat = CellLattice::from_window(spec.window, spec.dt, spec.dx);
    nr.small = sample_small_jump_increments(spec.measure, spec.window, lat, spec.epsilon,
                                            seed, spec.gaussian_correction);
    nr.tau = stopping_time(nr.overflow, spec.window.horizon);
    return nr;
}

NoiseRealization NoiseRealization::at_level(int level) const {
    require(level >= spec.trunc.level,
            "at_level can only raise the truncation level (thinning goes one way)");
    NoiseRealization nr = *this;
    nr.spec.trunc.level = level;
    nr.large = filter_large_at_level(base_large, nr.spec.trunc);
    // caps grow with N, so the level-N overflow is a subset of the stored one
    JumpSet of;
    of.window = overflow.window;
    of.band = JumpBand::Overflow;
    of.seed = overflow.seed;
    for (const auto& a : overflow.atoms)
        if (std::fabs(a.z) > nr.spec.trunc.cap(a.dist())) of.atoms.push_back(a);
    nr.overflow = of;
    nr.tau = stopping_time(nr.overflow, spec.window.horizon);
    return nr;
}

NoiseRealization NoiseRealization::restricted(double new_radius) const {
    require(new_radius > 0.0 && new_radius <= spec.window.radius,
            "restricted() needs 0 < new_radius <= current radius");
    double shift = (spec.window.radius - new_radius) / spec.dx;
    require(std::fabs(shift - std::round(shift)) < 1e-9,
            "restricted() needs the radius change to be a multiple of dx");
    int cell_shift = static_cast<int>(std::round(shift));

    NoiseRealization nr;
    nr.spec = spec;
    nr.spec.window.radius = new_radius;
    nr.seed = seed;
    nr.with_drift = with_drift;
    auto keep = [&](const JumpSet& src, JumpBand band) {
        JumpSet out;
        out.window = nr.spec.window;
        out.band = band;
        out.seed = src.seed;
        for (const auto& a : src.atoms) {
            if (std::fabs(a.x[0]) <= new_radius &&
                (spec.window.dim == 1 || std::fabs(a.x[1]) <= new_radius))
                out.atoms.push_back(a);
        }
        return out;
    };
    nr.base_large = keep(base_large, JumpBand::Large);
    nr.large = keep(large, JumpBand::Large);
    nr.overflow = overflow;  // tau keeps its whole-space meaning
    nr.overflow.window = nr.spec.window;
    nr.tau = tau;

    CellLattice lat = CellLattice::from_window(nr.spec.window, spec.dt, spec.dx);
    nr.small.epsilon = small.epsilon;
    nr.small.lattice = lat;
    nr.small.compensator_rate = small.compensator_rate;
    nr.small.atoms = keep(small.atoms, JumpBand::Small);
    nr.small.cell_sums.assign(static_cast<std::size_t>(lat.cell_count()), 0.0);
    for (int kt = 0; kt < lat.nt; ++kt)
        for (int ix = 0; ix < lat.nx; ++ix)
            for (int iy = 0; iy < lat.ny; ++iy) {
                int old_ix = ix + cell_shift;
                int old_iy = spec.window.dim == 2 ? iy + cell_shift : 0;
                nr.small.cell_sums[lat.index(kt, ix, iy)] =
                    small.cell_sums[small.lattice.index(kt, old_ix, old_iy)];
            }
    if (!small.gaussian_correction.empty()) {
        nr.small.gaussian_correction.assign(static_cast<std::size_t>(lat.cell_count()), 0.0);
        for (int kt = 0; kt < lat.nt; ++kt)
            for (int ix = 0; ix < lat.nx; ++ix)
                for (int iy = 0; iy < lat.ny; ++iy) {
                    int old_ix = ix + cell_shift;
                    int old_iy = spec.window.dim == 2 ? iy + cell_shift : 0;
                    nr.small.gaussian_correction[lat.index(kt, ix, iy)] =
                        small.gaussian_correction[small.lattice.index(kt, old_ix, old_iy)];
                }
    }
    return nr;
}

} // namespace levywave
