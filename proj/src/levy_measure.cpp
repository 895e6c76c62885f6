#include "levywave/levy_measure.hpp"

#include <cmath>

#include "levywave/quadrature.hpp"

namespace levywave {

LevyMeasure LevyMeasure::stable(double alpha, double c_plus, double c_minus) {
    require(alpha > 0.0 && alpha < 2.0, "stable index alpha must lie in (0,2)");
    require(c_plus >= 0.0 && c_minus >= 0.0, "stable weights c+ and c- must be >= 0");
    require(c_plus + c_minus > 0.0, "stable measure needs c+ + c- > 0");
    LevyMeasure m;
    m.kind_ = MeasureKind::Stable;
    m.alpha_ = alpha;
    m.c_plus_ = c_plus;
    m.c_minus_ = c_minus;
    m.small_exp_ = alpha;
    m.large_exp_ = alpha;
    m.pos_fraction_ = c_plus / (c_plus + c_minus);
    m.verify_levy_conditions();
    return m;
}

LevyMeasure LevyMeasure::user_density(std::function<double(double)> density,
                                      double small_exponent, double large_exponent) {
    require(static_cast<bool>(density), "user measure needs a density");
    require(small_exponent < 2.0, "small-jump exponent must be < 2 for a Levy measure");
    require(large_exponent > 0.0, "tail exponent must be > 0");
    LevyMeasure m;
    m.kind_ = MeasureKind::UserDensity;
    m.density_ = std::move(density);
    m.small_exp_ = small_exponent;
    m.large_exp_ = large_exponent;
    double pos = integrate_half_line([&](double z) { return m.density_(z); }, 1.0, 1e-9);
    double neg = integrate_half_line([&](double z) { return m.density_(-z); }, 1.0, 1e-9);
    m.pos_fraction_ = (pos + neg) > 0 ? pos / (pos + neg) : 0.5;
    m.verify_levy_conditions();
    return m;
}

void LevyMeasure::verify_levy_conditions() const {
    // int (|z|^2 ^ 1) nu(dz) < infty to 1e-8 relative, by refining the cutoff
    // at the origin; nu({0}) = 0 holds because nu is given by a density.
    double inner_a = abs_moment_band(2.0, 1e-6, 1.0);
    double inner_b = abs_moment_band(2.0, 1e-9, 1.0);
    double outer = tail(1.0);
    require(std::isfinite(inner_b) && std::isfinite(outer),
            "Levy condition failed: int (|z|^2 ^ 1) nu(dz) must be finite");
    double rel = std::fabs(inner_b - inner_a) / (std::fabs(inner_b) + 1e-300);
    double settled_scale = std::pow(1e-6, 2.0 - small_exp_);  // residual mass below the cutoff
    require(rel <= 1e-8 + 2.0 * settled_scale,
            "Levy condition failed: int_{|z|<=1} z^2 nu(dz) did not settle under cutoff refinement");
}

double LevyMeasure::density(double z) const {
    if (z == 0.0) return 0.0;
    if (is_stable()) {
        double a = std::fabs(z);
        double c = z > 0 ? c_plus_ : c_minus_;
        return c * std::pow(a, -alpha_ - 1.0);
    }
    return density_(z);
}

double LevyMeasure::tail(double u) const {
    require(u > 0.0, "tail level must be > 0");
    if (is_stable()) return (c_plus_ + c_minus_) / alpha_ * std::pow(u, -alpha_);
    return integrate_half_line([&](double z) { return density_(z) + density_(-z); }, u, 1e-10);
}

double LevyMeasure::band_mass(double lo, double hi) const {
    require(lo >= 0.0 && hi > lo, "band must satisfy 0 <= lo < hi");
    if (lo == 0.0) return abs_moment_band(0.0, 0.0, hi);
    if (std::isinf(hi)) return tail(lo);
    return tail(lo) - tail(hi);
}

double LevyMeasure::abs_moment_band(double m, double lo, double hi) const {
    require(lo >= 0.0 && hi > lo, "band must satisfy 0 <= lo < hi");
    if (is_stable()) {
        double c = c_plus_ + c_minus_;
        double e = m - alpha_;  // integrand |z|^{m-alpha-1}
        if (std::isinf(hi)) {
            if (e >= 0.0)
                throw divergence_error("int_{|z|>" + std::to_string(lo) + "} |z|^" +
                                       std::to_string(m) +
                                       " nu(dz) diverges: exponent must be < alpha");
            return -c / e * std::pow(lo, e);
        }
        if (lo == 0.0) {
            if (e <= 0.0)
                throw divergence_error("int_{|z|<=" + std::to_string(hi) + "} |z|^" +
                                       std::to_string(m) +
                                       " nu(dz) diverges: exponent must be > alpha");
            return c / e * std::pow(hi, e);
        }
        if (e == 0.0) return c * std::log(hi / lo);
        return c / e * (std::pow(hi, e) - std::pow(lo, e));
    }
    auto g = [&](double z) { return std::pow(z, m) * (density_(z) + density_(-z)); };
    if (std::isinf(hi)) {
        if (m >= large_exp_)
            throw divergence_error("tail moment of order " + std::to_string(m) + " diverges");
        return integrate_half_line(g, std::max(lo, 1e-300), 1e-10);
    }
    if (lo < 1e-12) {
        if (m <= small_exp_)
            throw divergence_error("small-jump moment of order " + std::to_string(m) + " diverges");
        // geometric shells toward the origin; the series converges like cut^{m-small_exp}
        double sum = 0.0, cut = hi;
        for (int k = 0; k < 64 && cut > std::max(lo, 1e-14); ++k) {
            double nxt = std::max(cut / 4, lo);
            sum += integrate(g, nxt, cut, 1e-10, 1e-16);
            cut = nxt;
        }
        return sum;
    }
    return integrate(g, lo, hi, 1e-10, 1e-16);
}

double LevyMeasure::signed_moment_band(double lo, double hi) const {
    require(lo >= 0.0 && hi > lo && !std::isinf(hi), "signed moment needs a finite band");
    if (is_stable()) {
        if (c_plus_ == c_minus_) return 0.0;
        double c = c_plus_ - c_minus_;
        double e = 1.0 - alpha_;
        if (lo == 0.0 && e <= 0.0)
            throw divergence_error(
                "compensator int z nu(dz) diverges near 0 (alpha >= 1 and asymmetric)");
        if (e == 0.0) return c * std::log(hi / lo);
        return c / e * (std::pow(hi, e) - std::pow(lo, e));
    }
    auto g = [&](double z) { return z * (density_(z) - density_(-z)); };
    if (lo < 1e-12) {
        double probe = integrate(g, 1e-6, hi, 1e-10, 1e-14);
        double probe2 = integrate(g, 1e-9, hi, 1e-10, 1e-14);
        if (std::fabs(probe2 - probe) > 1e-6 * (1.0 + std::fabs(probe2)))
            throw divergence_error("compensator int z nu(dz) diverges near 0");
        return probe2;
    }
    return integrate(g, lo, hi, 1e-10, 1e-16);
}

double LevyMeasure::gamma1(double p) const {
    require(p > 0.0, "gamma1 exponent p must be > 0");
    return abs_moment_band(p, 0.0, 1.0);
}

double LevyMeasure::gamma2(double q) const {
    require(q > 0.0, "gamma2 exponent q must be > 0");
    return abs_moment_band(q, 1.0, kInf);
}

double LevyMeasure::signed_small_moment() const { return signed_moment_band(0.0, 1.0); }

double LevyMeasure::integrate_band_side(bool positive, double lo, double hi) const {
    if (hi <= lo) return 0.0;
    if (is_stable()) {
        double c = positive ? c_plus_ : c_minus_;
        double ha = std::isinf(hi) ? 0.0 : std::pow(hi, -alpha_);
        return c / alpha_ * (std::pow(lo, -alpha_) - ha);
    }
    auto g = [&](double z) { return positive ? density_(z) : density_(-z); };
    if (std::isinf(hi)) return integrate_half_line(g, lo, 1e-10);
    return integrate(g, lo, hi, 1e-10, 1e-14);
}

double LevyMeasure::quantile_abs_band(double u01, double lo, double hi) const {
    if (is_stable()) {
        // |Z| on (lo,hi]: F(m) = (lo^-a - m^-a)/(lo^-a - hi^-a), inverted in closed form
        double la = std::pow(lo, -alpha_);
        double ha = std::isinf(hi) ? 0.0 : std::pow(hi, -alpha_);
        return std::pow(la - u01 * (la - ha), -1.0 / alpha_);
    }
    double total = band_mass(lo, hi);
    require(total > 0.0, "cannot sample from an empty band");
    auto mass_to = [&](double m) {
        return integrate([&](double z) { return density_(z) + density_(-z); }, lo, m, 1e-10, 1e-14);
    };
    double a = lo, b = std::isinf(hi) ? lo + 1.0 : hi;
    if (std::isinf(hi))
        while (mass_to(b) < u01 * total) b *= 2.0;
    for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        if (mass_to(m) < u01 * total) a = m; else b = m;
    }
    return 0.5 * (a + b);
}

double LevyMeasure::sample_band_mark(double lo, double hi, Rng& rng) const {
    double sign_u = rng.uniform();
    double mag = quantile_abs_band(rng.uniform(), lo, hi);
    if (is_stable()) return sign_u < pos_fraction_ ? mag : -mag;
    double pz = density_(mag), nz = density_(-mag);
    double frac = (pz + nz) > 0 ? pz / (pz + nz) : 0.5;
    return sign_u < frac ? mag : -mag;
}

double LevyMeasure::sample_tail_mark(double u, Rng& rng) const {
    return sample_band_mark(u, kInf, rng);
}

double LevyMeasure::band_cdf(double z, double lo, double hi) const {
    double total = band_mass(lo, hi);
    require(total > 0.0, "band_cdf over an empty band");
    double acc = 0.0;
    // negative part of the band below z
    if (z >= -lo)
        acc += integrate_band_side(false, lo, hi);
    else if (-z < hi)
        acc += integrate_band_side(false, -z, hi);
    // positive part below z
    if (z > lo) acc += integrate_band_side(true, lo, std::min(z, hi));
    return acc / total;
}

LevyMeasure make_stable_measure(double alpha, double c_plus, double c_minus) {
    return LevyMeasure::stable(alpha, c_plus, c_minus);
}

AssumptionA moment_functionals(const LevyMeasure& measure, double p, double q,
                               double declared_drift) {
    require(p > 0.0, "Assumption A requires p > 0");
    require(q > 0.0 && q <= p, "Assumption A requires 0 < q <= p");
    AssumptionA a;
    a.p = p;
    a.q = q;
    a.gamma1 = measure.gamma1(p);
    a.gamma2 = measure.gamma2(q);
    a.drift = (p < 1.0) ? measure.signed_small_moment() : declared_drift;
    return a;
}

} // namespace levywave
