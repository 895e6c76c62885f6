#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "levywave/levy_measure.hpp"
#include "levywave/noise.hpp"
#include "levywave/quadrature.hpp"

using namespace levywave;

namespace {

// quadrature oracles, independent of the closed forms under test
double oracle_gamma1(const LevyMeasure& m, double p) {
    double acc = 0.0, cut = 1.0;
    for (int k = 0; k < 40; ++k) {
        double nxt = cut / 4;
        acc += integrate([&](double z) { return std::pow(z, p) * (m.density(z) + m.density(-z)); },
                         nxt, cut, 1e-12, 1e-16);
        cut = nxt;
    }
    return acc;
}

double oracle_gamma2(const LevyMeasure& m, double q) {
    return integrate_half_line(
        [&](double z) { return std::pow(z, q) * (m.density(z) + m.density(-z)); }, 1.0, 1e-12);
}

} // namespace

TEST_CASE("stable measure moment functionals match the quadrature oracle") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    // oracle values frozen from adaptive quadrature of the density
    CHECK(oracle_gamma1(m, 2.0) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(oracle_gamma2(m, 1.0) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(m.gamma1(2.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(m.gamma2(1.0) == doctest::Approx(4.0).epsilon(1e-12));
    // nu(|z|>1) = (c+ + c-)/alpha
    double tail_oracle = integrate_half_line(
        [&](double z) { return m.density(z) + m.density(-z); }, 1.0, 1e-12);
    CHECK(tail_oracle == doctest::Approx(4.0 / 3).epsilon(1e-8));
    CHECK(m.tail(1.0) == doctest::Approx(4.0 / 3).epsilon(1e-12));

    AssumptionA a = moment_functionals(m, 2.0, 1.0);
    CHECK(a.gamma1 == doctest::Approx(4.0));
    CHECK(a.gamma2 == doctest::Approx(4.0));
    CHECK_FALSE(a.no_drift_mode());
}

TEST_CASE("moment functionals reject divergent exponents by name") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    CHECK_THROWS_AS(moment_functionals(m, 2.0, 1.5), divergence_error);
    CHECK_THROWS_AS(m.gamma1(1.5), divergence_error);  // p = alpha diverges too
    CHECK_THROWS_AS(m.gamma2(1.6), divergence_error);
}

TEST_CASE("p < 1 pins the drift; symmetric measures have b = 0") {
    LevyMeasure m = make_stable_measure(0.7, 1.0, 1.0);
    AssumptionA a = moment_functionals(m, 0.9, 0.5, /*declared*/ 123.0);
    CHECK(a.no_drift_mode());
    CHECK(a.drift == doctest::Approx(0.0));  // odd integrand
    LevyMeasure skew = make_stable_measure(0.7, 2.0, 1.0);
    AssumptionA b = moment_functionals(skew, 0.9, 0.5);
    // int_0^1 z * z^{-1.7} dz * (c+ - c-) = 1/0.3
    CHECK(b.drift == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
}

TEST_CASE("user-density measures agree with the stable closed forms") {
    LevyMeasure ref = make_stable_measure(1.2, 0.5, 1.5);
    LevyMeasure usr = LevyMeasure::user_density(
        [](double z) {
            double a = std::fabs(z);
            return (z > 0 ? 0.5 : 1.5) * std::pow(a, -2.2);
        },
        1.2, 1.2);
    CHECK(usr.tail(1.0) == doctest::Approx(ref.tail(1.0)).epsilon(1e-7));
    CHECK(usr.gamma1(2.0) == doctest::Approx(ref.gamma1(2.0)).epsilon(1e-6));
    CHECK(usr.gamma2(0.8) == doctest::Approx(ref.gamma2(0.8)).epsilon(1e-6));
    CHECK(usr.signed_moment_band(0.1, 1.0) ==
          doctest::Approx(ref.signed_moment_band(0.1, 1.0)).epsilon(1e-6));
}

TEST_CASE("large-jump sampler: intensity, reproducibility, empty band") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    SimWindow w(1.0, 1.0, 1);
    TruncationSpec big(1000000, 1.0);  // effectively no cap

    // zero mass above 1: a measure supported in |z| <= 1
    LevyMeasure small_only = LevyMeasure::user_density(
        [](double z) { return std::fabs(z) <= 1.0 ? std::pow(std::fabs(z), -1.3) : 0.0; }, 0.5,
        5.0);
    JumpSet empty = sample_large_jumps(small_only, w, big, 7);
    CHECK(empty.atoms.empty());

    // mean count 2 * nu(|z|>1) = 8/3 over many seeds, within 3 SE
    const int reps = 10000;
    double mean_target = w.volume() * m.tail(1.0);
    CHECK(mean_target == doctest::Approx(8.0 / 3).epsilon(1e-12));
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        JumpSet js = sample_large_jumps(m, w, big, 1000 + r);
        acc += js.size();
        acc2 += double(js.size()) * js.size();
    }
    double mu = acc / reps;
    double se = std::sqrt((acc2 / reps - mu * mu) / reps);
    CHECK(std::fabs(mu - mean_target) <= 3.0 * se);

    JumpSet a = sample_large_jumps(m, w, big, 99), b = sample_large_jumps(m, w, big, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.atoms[i].t == b.atoms[i].t);
        CHECK(a.atoms[i].x[0] == b.atoms[i].x[0]);
        CHECK(a.atoms[i].z == b.atoms[i].z);
    }
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a.atoms[i - 1].t <= a.atoms[i].t);
    for (const auto& atom : a.atoms) {
        CHECK(std::fabs(atom.z) > 1.0);
        CHECK(w.contains(atom.t, atom.x));
    }
}

TEST_CASE("disjoint windows have independent counts matching their intensities") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    SimWindow w(1.0, 1.0, 1);
    TruncationSpec big(1000000, 1.0);
    const int reps = 4000;
    double acc1 = 0, acc2 = 0, acc11 = 0, acc22 = 0, acc12 = 0;
    for (int r = 0; r < reps; ++r) {
        JumpSet js = sample_large_jumps(m, w, big, 555 + r);
        double n1 = 0, n2 = 0;
        for (const auto& a : js.atoms) (a.t < 0.5 ? n1 : n2) += 1.0;
        acc1 += n1; acc2 += n2;
        acc11 += n1 * n1; acc22 += n2 * n2; acc12 += n1 * n2;
    }
    double mu1 = acc1 / reps, mu2 = acc2 / reps;
    double halves = 0.5 * w.volume() * m.tail(1.0);
    double se1 = std::sqrt((acc11 / reps - mu1 * mu1) / reps);
    CHECK(std::fabs(mu1 - halves) <= 3.0 * se1);
    double cov = acc12 / reps - mu1 * mu2;
    double var1 = acc11 / reps - mu1 * mu1, var2 = acc22 / reps - mu2 * mu2;
    double cov_se = std::sqrt(var1 * var2 / reps);
    CHECK(std::fabs(cov) <= 4.0 * cov_se);
}

TEST_CASE("mark histogram matches the restricted measure (PIT + KS)") {
    LevyMeasure m = make_stable_measure(1.5, 2.0, 1.0);  // asymmetric
    SimWindow w(1.0, 1.0, 1);
    TruncationSpec trunc(4, 1.0);
    std::vector<double> pit;
    for (int r = 0; pit.size() < 10000; ++r) {
        JumpSet js = sample_large_jumps(m, w, trunc, 31000 + r);
        for (const auto& a : js.atoms)
            pit.push_back(m.band_cdf(a.z, 1.0, trunc.cap(a.dist())));
    }
    std::sort(pit.begin(), pit.end());
    double n = static_cast<double>(pit.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < pit.size(); ++i) {
        double ecdf_hi = (i + 1) / n, ecdf_lo = i / n;
        ks = std::max({ks, std::fabs(ecdf_hi - pit[i]), std::fabs(pit[i] - ecdf_lo)});
    }
    CHECK(ks < 2.0 / std::sqrt(n));
}

TEST_CASE("small-jump field: compensator, variance anchor, empty band") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    SimWindow w(1.0, 1.0, 1);
    CellLattice lat = CellLattice::from_window(w, 0.25, 0.25);

    SmallJumpField zero_band = sample_small_jump_increments(m, w, lat, 1.0, 5);
    for (double v : zero_band.cell_sums) CHECK(v == 0.0);
    CHECK(zero_band.compensator_rate == 0.0);

    CHECK_THROWS_AS(sample_small_jump_increments(m, w, lat, 1.5, 5), std::invalid_argument);

    // variance per cell = |cell| * int_{eps<|z|<=1} z^2 nu = |cell| * 2.735...
    const double eps = 0.1;
    double m2_oracle =
        2.0 * integrate([&](double z) { return z * z * std::pow(z, -2.5); }, eps, 1.0, 1e-12, 1e-15);
    CHECK(m2_oracle == doctest::Approx(2.0 * (1.0 - std::sqrt(0.1)) / 0.5).epsilon(1e-10));
    CHECK(m2_oracle == doctest::Approx(2.7351).epsilon(1e-4));

    const int reps = 10000;
    double cell_vol = lat.cell_volume(1);
    double acc = 0.0, acc2 = 0.0, accm = 0.0;
    for (int r = 0; r < reps; ++r) {
        SmallJumpField f = sample_small_jump_increments(m, w, lat, eps, 900 + r);
        CHECK(f.compensator_rate == 0.0);  // symmetric
        double v = f.increment(0, 0, 0, true);
        accm += v;
        acc += v * v;
        acc2 += v * v * v * v;
    }
    double var_target = cell_vol * m2_oracle;
    double mu2 = acc / reps;
    double se = std::sqrt((acc2 / reps - mu2 * mu2) / reps);
    CHECK(std::fabs(mu2 - var_target) <= 3.0 * se);
    CHECK(std::fabs(accm / reps) <= 3.0 * std::sqrt(mu2 / reps));
}

TEST_CASE("exceedance rate: closed form, monotonicity, divergence") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    // whole-space oracle: (4/3) N^{-3/2} int (1+|x|)^{-3/2} dx, and the spatial
    // integral equals 4
    double spatial = 2.0 * integrate_half_line(
                               [](double x) { return std::pow(1.0 + x, -1.5); }, 0.0, 1e-12);
    CHECK(spatial == doctest::Approx(4.0).epsilon(1e-7));
    double rate4 = exceedance_rate(m, TruncationSpec(4, 1.0), 1, kInf);
    CHECK(rate4 == doctest::Approx(2.0 / 3).epsilon(1e-7));

    double prev = kInf;
    for (int N : {1, 2, 4, 8, 16}) {
        double r = exceedance_rate(m, TruncationSpec(N, 1.0), 1, kInf);
        CHECK(r < prev);
        prev = r;
    }
    CHECK_THROWS_AS(exceedance_rate(m, TruncationSpec(4, 0.5), 1, kInf), divergence_error);
    // box-restricted rate is smaller than the whole-space rate
    double boxed = exceedance_rate(m, TruncationSpec(4, 1.0), 1, 2.0);
    CHECK(boxed < rate4);
    CHECK(boxed > 0.0);
}

TEST_CASE("stopping times: law, coupling, empty overflow") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    JumpSet none;
    none.window = SimWindow(1.0, 1.0, 1);
    CHECK(stopping_time(none, 1.0) == kInf);

    NoiseSpec spec;
    spec.measure = m;
    spec.assumption = moment_functionals(m, 2.0, 1.0);
    spec.trunc = TruncationSpec(4, 1.0);
    spec.window = SimWindow(1.0, 2.0, 1);
    spec.epsilon = 1.0;  // stopping law only needs the overflow bands
    spec.dt = 0.5;
    spec.dx = 0.5;

    const int reps = 10000;
    const double T = 1.0;
    double lam4 = exceedance_rate(m, spec.trunc, 1, kInf);
    CHECK(lam4 == doctest::Approx(2.0 / 3).epsilon(1e-7));
    double target = 1.0 - std::exp(-T * lam4);
    CHECK(target == doctest::Approx(0.4866).epsilon(1e-3));

    int hits = 0, mono_bad = 0;
    for (int r = 0; r < reps; ++r) {
        NoiseRealization nr = sample_noise(spec, 77000 + r);
        if (nr.tau <= T) ++hits;
        NoiseRealization nr8 = nr.at_level(8);
        if (nr8.tau < nr.tau) ++mono_bad;  // thinning can only delay the overflow
    }
    CHECK(mono_bad == 0);
    double p_hat = double(hits) / reps;
    double se = std::sqrt(target * (1.0 - target) / reps);
    CHECK(std::fabs(p_hat - target) <= 3.0 * se);
}

TEST_CASE("no-drift mode is entered exactly when p < 1") {
    LevyMeasure m = make_stable_measure(0.7, 1.0, 1.0);
    NoiseSpec spec;
    spec.measure = m;
    spec.assumption = moment_functionals(m, 0.9, 0.5);
    spec.trunc = TruncationSpec(2, 2.5);
    spec.window = SimWindow(0.5, 1.0, 1);
    spec.epsilon = 0.25;
    spec.dt = 0.25;
    spec.dx = 0.5;
    NoiseRealization nr = sample_noise(spec, 5);
    CHECK_FALSE(nr.with_drift);
    CHECK(nr.drift() == 0.0);

    LevyMeasure m2 = make_stable_measure(1.5, 1.0, 1.0);
    NoiseSpec spec2 = spec;
    spec2.measure = m2;
    spec2.assumption = moment_functionals(m2, 2.0, 1.0, 0.25);
    NoiseRealization nr2 = sample_noise(spec2, 5);
    CHECK(nr2.with_drift);
    CHECK(nr2.drift() == doctest::Approx(0.25));
}

TEST_CASE("jump set csv round-trips") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    SimWindow w(1.0, 1.0, 1);
    JumpSet js = sample_large_jumps(m, w, TruncationSpec(4, 1.0), 12);
    std::stringstream ss;
    js.write_csv(ss);
    JumpSet back = JumpSet::read_csv(ss, w, js.seed);
    REQUIRE(back.size() == js.size());
    for (std::size_t i = 0; i < js.size(); ++i) {
        CHECK(back.atoms[i].t == js.atoms[i].t);
        CHECK(back.atoms[i].x[0] == js.atoms[i].x[0]);
        CHECK(back.atoms[i].z == js.atoms[i].z);
    }
    CHECK(back.band == JumpBand::Large);
}

TEST_CASE("opt-in gaussian small-jump correction matches the discarded variance") {
    LevyMeasure m = make_stable_measure(1.5, 1.0, 1.0);
    SimWindow w(1.0, 1.0, 1);
    CellLattice lat = CellLattice::from_window(w, 0.5, 0.5);
    const double eps = 0.2;
    double var_rate = m.abs_moment_band(2.0, 0.0, eps);
    const int reps = 4000;
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        SmallJumpField with = sample_small_jump_increments(m, w, lat, eps, 3000 + r, true);
        SmallJumpField without = sample_small_jump_increments(m, w, lat, eps, 3000 + r, false);
        REQUIRE_FALSE(with.gaussian_correction.empty());
        CHECK(without.gaussian_correction.empty());
        double g = with.increment(0, 0, 0, true) - without.increment(0, 0, 0, true);
        acc += g;
        acc2 += g * g;
    }
    double target = var_rate * lat.cell_volume(1);
    double mu2 = acc2 / reps;
    double se = std::sqrt(2.0 / reps) * mu2;  // chi^2 variance of the variance
    CHECK(std::fabs(acc / reps) <= 3.0 * std::sqrt(mu2 / reps));
    CHECK(std::fabs(mu2 - target) <= 4.0 * se);
}
