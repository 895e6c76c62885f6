#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "levywave/fft.hpp"
#include "levywave/quadrature.hpp"
#include "levywave/rng.hpp"

using namespace levywave;

TEST_CASE("adaptive quadrature reproduces analytic integrals") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, kPi) == doctest::Approx(2.0).epsilon(1e-12));
    // oscillatory with initial splitting
    double osc = integrate_split([](double x) { return std::cos(40.0 * x); }, 0.0, 1.0, 64);
    CHECK(osc == doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-10));
    // gaussian tail over the half line
    double g = integrate_half_line([](double x) { return std::exp(-x * x); }, 0.0);
    CHECK(g == doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-10));
}

TEST_CASE("edge rule absorbs integrable power singularities") {
    // int_0^1 u^{-1/2} du = 2
    double v = integrate_edge([](double u) { return 1.0 / std::sqrt(u); }, 1.0, 8);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-11));
    // int_0^1 u^{-0.95} du = 20: 16% of the mass lies within 1e-16 of the edge
    double w = integrate_edge([](double u) { return std::pow(u, -0.95); }, 1.0, 8);
    CHECK(w == doctest::Approx(20.0).epsilon(1e-9));
    // beta(1/2, 1/2) = pi, both endpoints singular, split at the midpoint
    auto half = [](double u) { return 1.0 / std::sqrt(u * (1.0 - u)); };
    double b = 2.0 * integrate_edge(half, 0.5, 8);
    CHECK(b == doctest::Approx(kPi).epsilon(1e-11));
    // mild singularity through the symmetric rule stays serviceable
    double s = integrate_tanh_sinh([](double x) { return 1.0 / std::sqrt(1.0 - x * x); },
                                   -1.0, 1.0, 8);
    CHECK(s == doctest::Approx(kPi).epsilon(1e-7));
}

TEST_CASE("rng substreams are deterministic and decorrelated") {
    Rng a(42), b(42);
    for (int i = 0; i < 5; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng s1 = Rng(42).substream("large-jumps", 0);
    Rng s2 = Rng(42).substream("large-jumps", 1);
    CHECK(s1.next_u64() != s2.next_u64());
    Rng s3 = Rng(42).substream("small-jumps", 0);
    CHECK(Rng(42).substream("small-jumps", 0).next_u64() == s3.next_u64());
}

TEST_CASE("uniform and poisson samplers have the right first moments") {
    Rng rng(7);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        s += u;
        s2 += u * u;
    }
    CHECK(s / n == doctest::Approx(0.5).epsilon(3e-3));
    CHECK(s2 / n == doctest::Approx(1.0 / 3).epsilon(5e-3));

    for (double mean : {0.3, 4.0, 57.0}) {
        double acc = 0.0, acc2 = 0.0;
        const int m = 100000;
        for (int i = 0; i < m; ++i) {
            double k = static_cast<double>(rng.poisson(mean));
            acc += k;
            acc2 += k * k;
        }
        double mu = acc / m, var = acc2 / m - mu * mu;
        double se = std::sqrt(mean / m);
        CHECK(std::fabs(mu - mean) < 4.0 * se);
        CHECK(var == doctest::Approx(mean).epsilon(0.05));
    }
}

TEST_CASE("fft matches the direct transform and inverts") {
    Rng rng(3);
    std::vector<std::complex<double>> a(64);
    for (auto& v : a) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto direct = a;
    std::vector<std::complex<double>> ref(64);
    for (std::size_t k = 0; k < 64; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < 64; ++j)
            acc += direct[j] * std::polar(1.0, -2.0 * kPi * double(k * j) / 64.0);
        ref[k] = acc;
    }
    fft_radix2(a, false);
    for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(a[k] - ref[k]) < 1e-10);
    fft_radix2(a, true);
    for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(a[k] - direct[k]) < 1e-12);
}
