#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levywave/verification.hpp"

using namespace levywave;

namespace {

// exact antiderivative of |cos| on [0, X]
double cos_abs_integral_exact(double X) {
    double k = std::floor(X / kPi);
    double y = X - k * kPi;
    double rem = y <= 0.5 * kPi ? std::sin(y) : 2.0 - std::sin(y);
    return 2.0 * k + rem;
}

} // namespace

TEST_CASE("box integrand masses") {
    BoxIntegrand h{1, {{0.0, 1.0, -0.5, 0.5, 0, 0, 2.0}}};
    CHECK(h.abs_power_mass(1.0) == doctest::Approx(2.0));
    CHECK(h.abs_power_mass(2.0) == doctest::Approx(4.0));
    CHECK(h.value(0.5, 0.0) == 2.0);
    CHECK(h.value(1.5, 0.0) == 0.0);
    SimWindow w = h.bounding_window();
    CHECK(w.horizon == 1.0);
    CHECK(w.radius == 0.5);
}

TEST_CASE("rosenthal: zero integrand, p=2 isometry, p=4 stability") {
    LevyMeasure m = LevyMeasure::stable(1.5, 1.0, 1.0);
    BoxIntegrand zero{1, {{0.0, 1.0, -0.5, 0.5, 0, 0, 0.0}}};
    CheckReport z = rosenthal_check(zero, 2.0, m, 0.1, 200, 1);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);

    BoxIntegrand one{1, {{0.0, 1.0, -0.5, 0.5, 0, 0, 1.0}}};
    CheckReport iso = rosenthal_check(one, 2.0, m, 0.1, 10000, 21);
    CHECK(iso.pass);  // end-value isometry within 3 SE
    // the quadrature side: (int H^2 z^2 nu)^{1} + int H^p |z|^p nu with |box| = 1
    double m2 = m.abs_moment_band(2.0, 0.1, 1.0);
    CHECK(m2 == doctest::Approx(2.0 * (1.0 - std::sqrt(0.1)) / 0.5).epsilon(1e-12));
    CHECK(iso.rhs == doctest::Approx(m2 + m2));  // p = 2 makes both terms equal
    CHECK(std::isfinite(iso.ratio));

    CheckReport p4a = rosenthal_check(one, 4.0, m, 0.1, 4000, 31);
    CheckReport p4b = rosenthal_check(one, 4.0, m, 0.1, 8000, 32);
    CHECK(p4a.pass);
    CHECK(p4b.pass);
    CHECK(std::fabs(p4a.lhs - p4b.lhs) <= 3.0 * (p4a.lhs_se + p4b.lhs_se));
    CHECK_THROWS_AS(rosenthal_check(one, 1.5, m, 0.1, 100, 1), std::invalid_argument);
}

TEST_CASE("poisson moment: variance anchor and exact quadratic scaling") {
    LevyMeasure m = LevyMeasure::stable(1.5, 1.0, 1.0);
    BoxIntegrand one{1, {{0.0, 1.0, -0.5, 0.5, 0, 0, 1.0}}};
    CheckReport r = poisson_moment_check(one, 2.0, m, 4.0, 20000, 77);
    CHECK(r.pass);
    // symmetric band: E |sum|^2 = |box| int_{1<|z|<=4} z^2 nu (mean is 0)
    double target = m.abs_moment_band(2.0, 1.0, 4.0);
    CHECK(std::fabs(r.lhs - target) <= 3.0 * r.lhs_se);

    BoxIntegrand two{1, {{0.0, 1.0, -0.5, 0.5, 0, 0, 2.0}}};
    CheckReport r2 = poisson_moment_check(two, 2.0, m, 4.0, 20000, 77);
    CHECK(r2.lhs == doctest::Approx(4.0 * r.lhs).epsilon(1e-12));  // same seed, same atoms

    CHECK_THROWS_AS(poisson_moment_check(one, 2.0, m, 0.5, 100, 1), std::invalid_argument);
}

TEST_CASE("convolution moment transfer: implied constant is replicate-stable") {
    NoiseSpec spec;
    spec.measure = LevyMeasure::stable(1.5, 1.0, 1.0);
    spec.assumption = moment_functionals(spec.measure, 2.0, 1.0);
    spec.trunc = TruncationSpec(4, 1.5);
    spec.window = SimWindow(1.0, 2.0, 1);
    spec.epsilon = 0.05;
    spec.dt = 1.0 / 32;
    spec.dx = 1.0 / 8;
    spec.outside_overflow = false;
    CheckReport a = convolution_moment_check(spec, 1.0, 0.0, 800, 5);
    CheckReport b = convolution_moment_check(spec, 1.0, 0.0, 1600, 6);
    CHECK(a.pass);
    CHECK(b.pass);
    CHECK(a.rhs == doctest::Approx(b.rhs));  // quadrature side is deterministic
    CHECK(std::fabs(a.lhs - b.lhs) <= 3.0 * (a.lhs_se + b.lhs_se));
    CHECK(a.ratio > 0.0);

    // d=2 branch with p < 2
    NoiseSpec spec2 = spec;
    spec2.assumption = moment_functionals(spec2.measure, 1.8, 1.0);
    spec2.trunc = TruncationSpec(4, 2.5);
    spec2.window = SimWindow(0.5, 1.0, 2);
    spec2.dt = 1.0 / 16;
    spec2.dx = 1.0 / 8;
    CheckReport c = convolution_moment_check(spec2, 0.5, 0.0, 300, 7);
    CHECK(c.pass);
    CHECK(std::isfinite(c.ratio));
}

TEST_CASE("moment bound scan: sigma = 0 reproduces |w|^p with zero MC error") {
    MomentScanConfig cfg;
    cfg.noise.measure = LevyMeasure::stable(1.5, 1.0, 1.0);
    cfg.noise.assumption = moment_functionals(cfg.noise.measure, 2.0, 1.0);
    cfg.noise.trunc = TruncationSpec(4, 1.5);
    cfg.noise.window = SimWindow(1.0, 2.0, 1);
    cfg.noise.epsilon = 0.1;
    cfg.noise.dt = 1.0 / 32;
    cfg.noise.dx = 1.0 / 8;
    cfg.noise.outside_overflow = false;
    cfg.grid = Grid(1, 1.0 / 32, 1.0 / 8, 1.0, 1.0, 2.0);
    cfg.init = InitialData::registry("constant-one");
    cfg.sigma = SigmaFn::registry("zero");
    cfg.p = 2.0;
    cfg.eval_times = {0.5, 1.0};
    cfg.eval_points = {-1.0, 0.0, 1.0};
    cfg.replicates = 20;
    cfg.seed = 3;
    MomentScan scan = moment_bound_scan(cfg);
    CHECK(scan.converged == 20);
    CHECK(scan.failed == 0);
    for (const auto& row : scan.table)
        for (double v : row) CHECK(v == doctest::Approx(1.0));  // w = 1, |w|^2 = 1
    CHECK(scan.sup == doctest::Approx(1.0));

    cfg.sigma = SigmaFn::registry("linear");
    cfg.replicates = 50;
    MomentScan lin = moment_bound_scan(cfg);
    CHECK(lin.converged + lin.failed == 50);
    CHECK(lin.converged > 45);
    CHECK(std::isfinite(lin.sup));
    CHECK(lin.sup >= 1.0);

    cfg.eval_times = {0.33};
    CHECK_THROWS_AS(moment_bound_scan(cfg), std::invalid_argument);
}

TEST_CASE("cosine average bound: anchors and envelope") {
    CosAverageReport rep = cos_average_bound_check(kPi / 2, {0.0, 1.0, 100.0});
    CHECK(rep.lhs[0] == doctest::Approx(kPi / 2));
    CHECK(rep.lhs[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.lhs[1] == doctest::Approx(cos_abs_integral_exact(kPi / 2)).epsilon(1e-10));
    CHECK(rep.pass);
    CHECK(rep.empirical_constant >= kPi / 2);

    // quadrature against the exact antiderivative across a sweep
    CosAverageReport rep2 = cos_average_bound_check(1.0, {0.5, 2.0, 10.0, 37.7, 100.0});
    for (std::size_t i = 0; i < rep2.xi.size(); ++i) {
        double xi = rep2.xi[i];
        CHECK(rep2.lhs[i] == doctest::Approx(cos_abs_integral_exact(xi) / xi).epsilon(1e-9));
    }
    // |cos| equidistributes: lhs ~ 2/pi for large |xi| T = 1
    CHECK(rep2.lhs.back() == doctest::Approx(2.0 / kPi).epsilon(0.02));

    // grid refinement stability of the empirical constant
    std::vector<double> coarse{0.0, 1.0, 5.0, 20.0, 100.0};
    std::vector<double> fine;
    for (double x = 0.0; x <= 100.0; x += 2.5) fine.push_back(x);
    double c1 = cos_average_bound_check(1.0, coarse).empirical_constant;
    double c2 = cos_average_bound_check(1.0, fine).empirical_constant;
    CHECK(std::fabs(c2 - c1) / c2 <= 0.1);
}
