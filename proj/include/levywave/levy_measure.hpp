#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "levywave/common.hpp"
#include "levywave/rng.hpp"

namespace levywave {

enum class MeasureKind { Stable, UserDensity };

/// Jump-size measure nu on R\{0} with int (|z|^2 ^ 1) nu(dz) < infty.
/// The stable kind has density c+ z^{-alpha-1} on z>0, c- (-z)^{-alpha-1}
/// on z<0; its tail and moment functionals are served in closed form.
/// User densities fall back to adaptive quadrature and numeric inversion.
class LevyMeasure {
public:
    static LevyMeasure stable(double alpha, double c_plus, double c_minus);

    /// density(z), with declared local exponents: near 0 the density is
    /// O(|z|^{-1-small_exponent}) with small_exponent < 2, and for |z|>1 it is
    /// O(|z|^{-1-large_exponent}) with large_exponent > 0.
    static LevyMeasure user_density(std::function<double(double)> density,
                                    double small_exponent, double large_exponent);

    MeasureKind kind() const { return kind_; }
    bool is_stable() const { return kind_ == MeasureKind::Stable; }
    double alpha() const { return alpha_; }
    double c_plus() const { return c_plus_; }
    double c_minus() const { return c_minus_; }

    /// decay exponent of the tail: nu(|z|>u) = O(u^{-tail_exponent})
    double tail_exponent() const { return is_stable() ? alpha_ : large_exp_; }

    double density(double z) const;

    /// nu({|z| > u}), u > 0
    double tail(double u) const;

    /// nu({lo < |z| <= hi}), 0 <= lo < hi (hi may be +inf)
    double band_mass(double lo, double hi) const;

    /// int_{lo<|z|<=hi} |z|^m nu(dz)
    double abs_moment_band(double m, double lo, double hi) const;

    /// int_{lo<|z|<=hi} z nu(dz)  (the compensator integrand)
    double signed_moment_band(double lo, double hi) const;

    /// gamma1 = int_{|z|<=1} |z|^p nu(dz); throws divergence_error if infinite
    double gamma1(double p) const;

    /// gamma2 = int_{|z|>1} |z|^q nu(dz); throws divergence_error if infinite
    double gamma2(double q) const;

    /// int_{|z|<=1} z nu(dz); the mandated drift when p < 1
    double signed_small_moment() const;

    /// draw from nu conditioned on lo < |z| <= hi
    double sample_band_mark(double lo, double hi, Rng& rng) const;

    /// draw from nu conditioned on |z| > u
    double sample_tail_mark(double u, Rng& rng) const;

    /// conditional CDF P(Z <= z | lo < |Z| <= hi), used by the mark
    /// histogram tests (probability integral transform)
    double band_cdf(double z, double lo, double hi) const;

private:
    LevyMeasure() = default;
    void verify_levy_conditions() const;
    double quantile_abs_band(double u01, double lo, double hi) const;
    double integrate_band_side(bool positive, double lo, double hi) const;

    MeasureKind kind_ = MeasureKind::Stable;
    double alpha_ = 0, c_plus_ = 0, c_minus_ = 0;
    std::function<double(double)> density_;
    double small_exp_ = 0, large_exp_ = 0;
    double pos_fraction_ = 0.5;  // nu(0,inf)-share of |z|>u tails; exact for stable
};

/// h(x) = 1 + |x|^eta at truncation level N.
struct TruncationSpec {
    int level = 1;      // N
    double eta = 1.0;

    TruncationSpec() = default;
    TruncationSpec(int N, double eta_) : level(N), eta(eta_) {
        require(N >= 1, "truncation level N must be >= 1");
        require(eta_ > 0.0, "truncation exponent eta must be > 0");
    }

    double weight(double dist) const { return 1.0 + std::pow(std::fabs(dist), eta); }
    double cap(double dist) const { return level * weight(dist); }
};

/// Moment conditions on nu: gamma1 = int_{|z|<=1}|z|^p, gamma2 = int_{|z|>1}|z|^q,
/// with the drift pinned to int_{|z|<=1} z nu(dz) when p < 1.
struct AssumptionA {
    double p = 2.0;
    double q = 1.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double drift = 0.0;

    bool no_drift_mode() const { return p < 1.0; }
};

LevyMeasure make_stable_measure(double alpha, double c_plus, double c_minus);

/// Computes gamma1, gamma2 and the drift; enforces the p<1 drift rule.
/// `declared_drift` is the b of the noise definition, used when p >= 1.
AssumptionA moment_functionals(const LevyMeasure& measure, double p, double q,
                               double declared_drift = 0.0);

} // namespace levywave
