#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levywave/solver.hpp"

using namespace levywave;

namespace {

NoiseSpec base_spec_d1(double T = 1.0, double R = 2.0, double eps = 0.05, int level = 4) {
    NoiseSpec spec;
    spec.measure = LevyMeasure::stable(1.5, 1.0, 1.0);
    spec.assumption = moment_functionals(spec.measure, 2.0, 1.0);
    spec.trunc = TruncationSpec(level, 1.5);
    spec.window = SimWindow(T, R, 1);
    spec.epsilon = eps;
    spec.dt = 1.0 / 64;
    spec.dx = 1.0 / 16;
    spec.outside_overflow = false;
    return spec;
}

NoiseRealization empty_noise(const NoiseSpec& spec) {
    NoiseSpec s = spec;
    s.epsilon = 1.0;  // empty small band
    NoiseRealization nr = sample_noise(s, 1);
    nr.base_large.atoms.clear();
    nr.large.atoms.clear();
    nr.overflow.atoms.clear();
    nr.tau = kInf;
    return nr;
}

} // namespace

TEST_CASE("homogeneous wave: constants, linear time, separated d=1 solution") {
    InitialData one = InitialData::registry("constant-one");
    InitialData lin = InitialData::registry("linear-time");
    for (int dim : {1, 2}) {
        CHECK(homogeneous_wave(one, dim, 0.7, 0.3, 0.1) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(homogeneous_wave(lin, dim, 0.7, -0.4, 0.2) == doctest::Approx(0.7).epsilon(1e-9));
        CHECK(homogeneous_wave(one, dim, 0.0, 0.5, 0.0) == doctest::Approx(1.0));
    }
    InitialData sine = InitialData::registry("sine");
    for (double t : {0.1, 0.5, 1.0})
        for (double x : {-1.0, 0.0, 0.7})
            CHECK(homogeneous_wave(sine, 1, t, x) ==
                  doctest::Approx(std::sin(x) * std::cos(t)).epsilon(1e-10));
}

TEST_CASE("stochastic convolution: zero noise, one atom, two atoms") {
    NoiseSpec spec = base_spec_d1();
    Grid grid(1, spec.dt, spec.dx, 1.0, 1.0, 2.0);

    NoiseRealization nr = empty_noise(spec);
    CHECK(stochastic_convolution(nr, grid, {}, 0.9, 0.25) == 0.0);

    JumpAtom a1{0.25, {0.5, 0.0}, 2.0};
    nr.large.atoms.push_back(a1);
    double v = stochastic_convolution(nr, grid, {}, 0.9, 0.25);
    CHECK(v == doctest::Approx(2.0 * eval_kernel(1, 0.9 - 0.25, 0.25 - 0.5)).epsilon(1e-15));
    CHECK(v == doctest::Approx(1.0));  // inside the cone, G = 1/2

    JumpAtom a2{0.5, {-0.4, 0.0}, -3.0};
    nr.large.atoms.push_back(a2);
    double v2 = stochastic_convolution(nr, grid, {}, 0.9, 0.25);
    // second atom: |x - X| = 0.65 >= t - T = 0.4, outside the cone
    CHECK(v2 == doctest::Approx(1.0));
    // first atom sits exactly on the light-cone boundary: strict indicator, 0
    double v3 = stochastic_convolution(nr, grid, {}, 0.95, -0.2);
    CHECK(v3 == doctest::Approx((-3.0) * 0.5));

    CHECK_THROWS_AS(stochastic_convolution(nr, grid, {}, 1.5, 0.0), coverage_error);
    CHECK_THROWS_AS(stochastic_convolution(nr, grid, {}, 0.5, 3.0), coverage_error);
}

TEST_CASE("picard: sigma = 0 returns w in one iteration") {
    NoiseSpec spec = base_spec_d1();
    NoiseRealization nr = sample_noise(spec, 42);
    Grid grid(1, spec.dt, spec.dx, 1.0, 1.0, 2.0);
    SolutionPath path = picard_solve(InitialData::registry("constant-one"),
                                     SigmaFn::registry("zero"), nr, grid, {});
    CHECK(path.converged);
    CHECK(path.iterations == 1);
    CHECK(path.effective_iterations == 0);
    for (int k = 0; k <= grid.nt(); ++k)
        for (std::size_t j = 0; j < grid.points_per_slice(); ++j)
            CHECK(path.u[k][j] == path.w[k][j]);
}

TEST_CASE("picard: additive noise is a fixed point after one effective iteration") {
    NoiseSpec spec = base_spec_d1();
    NoiseRealization nr = sample_noise(spec, 7);
    Grid grid(1, spec.dt, spec.dx, 1.0, 1.0, 2.0);
    SolutionPath path = picard_solve(InitialData::registry("constant-one"),
                                     SigmaFn::registry("constant"), nr, grid, {});
    CHECK(path.converged);
    CHECK(path.effective_iterations == 1);
    REQUIRE(path.distances.size() >= 2);
    CHECK(path.distances.back() == 0.0);  // identical sums on the second pass

    // decomposition identity holds exactly as stored
    for (int k = 0; k <= grid.nt(); ++k)
        for (std::size_t j = 0; j < grid.points_per_slice(); ++j)
            CHECK(path.u[k][j] ==
                  path.w[k][j] + path.u1[k][j] + path.u2[k][j] + path.u3[k][j]);

    // agreement with the pointwise convolution service
    for (int k : {16, 48, 64})
        for (int j : {8, 32, 49}) {
            double conv = stochastic_convolution(nr, grid, {}, grid.t_of(k), grid.x_of(j));
            CHECK(path.u[k][j] - path.w[k][j] == doctest::Approx(conv).epsilon(1e-12));
        }
}

TEST_CASE("picard: linear sigma converges with a residual fixed point") {
    NoiseSpec spec = base_spec_d1();
    NoiseRealization nr = sample_noise(spec, 11);
    Grid grid(1, spec.dt, spec.dx, 1.0, 1.0, 2.0);
    PicardOptions opts;
    opts.tol = 1e-10;
    SolutionPath path = picard_solve(InitialData::registry("constant-one"),
                                     SigmaFn::registry("linear"), nr, grid, opts);
    REQUIRE(path.converged);
    std::size_t nd = path.distances.size();
    REQUIRE(nd >= 2);
    CHECK(path.distances[nd - 1] < 1e-10);
    // residual of the fixed-point equation, re-substituting the final iterate
    ConvolutionWeights wts;
    for (const auto& a : nr.large.atoms) {
        int kp = std::max(0, static_cast<int>(std::ceil(a.t / grid.dt)) - 1);
        double q = (a.x[0] + grid.radius) / grid.dx;
        int j = std::clamp(static_cast<int>(q), 0, grid.nx() - 1);
        double f = q - j;
        wts.atom_sigma.push_back((1 - f) * path.u[kp][j] + f * path.u[kp][j + 1]);
    }
    const CellLattice& lat = nr.small.lattice;
    wts.cell_sigma.assign(static_cast<std::size_t>(lat.cell_count()), 0.0);
    for (int c = 0; c < lat.nt; ++c)
        for (int m = 0; m < lat.nx; ++m) {
            int slice = std::min(c, grid.nt());
            wts.cell_sigma[lat.index(c, m, 0)] =
                0.5 * (path.u[slice][m] + path.u[slice][m + 1]);
        }
    for (int k : {32, 64})
        for (int j : {16, 32, 48}) {
            double rhs = path.w[k][j] + stochastic_convolution(nr, grid, wts, grid.t_of(k),
                                                               grid.x_of(j));
            CHECK(path.u[k][j] == doctest::Approx(rhs).epsilon(1e-7));
        }
}

TEST_CASE("patching: identity, coupled agreement, selection, coverage error") {
    NoiseSpec spec = base_spec_d1(1.0, 2.0, 0.05, 1);
    spec.trunc = TruncationSpec(1, 1.5);
    NoiseRealization nr1 = sample_noise(spec, 23);
    Grid grid(1, spec.dt, spec.dx, 1.0, 1.0, 2.0);
    InitialData init = InitialData::registry("constant-one");
    SigmaFn sig = SigmaFn::registry("constant");

    SolutionPath p1 = picard_solve(init, sig, nr1, grid, {});
    if (p1.tau == kInf) {
        SolutionPath patched = patch_solution({p1});
        for (int k = 0; k <= grid.nt(); ++k) CHECK(patched.source_level[k] == 1);
    }

    NoiseRealization nr2 = nr1.at_level(2);
    SolutionPath p2 = picard_solve(init, sig, nr2, grid, {});
    // on t <= tau_1 the two levels agree exactly (extra atoms have zero kernel)
    for (int k = 0; k <= grid.nt(); ++k) {
        if (grid.t_of(k) > p1.tau) break;
        for (std::size_t j = 0; j < grid.points_per_slice(); ++j)
            CHECK(p1.u[k][j] == p2.u[k][j]);
    }
    SolutionPath patched = patch_solution({p1, p2});
    for (int k = 0; k <= grid.nt(); ++k) {
        if (grid.t_of(k) <= p1.tau)
            CHECK(patched.source_level[k] == 1);
        else if (grid.t_of(k) <= p2.tau)
            CHECK(patched.source_level[k] == 2);
    }

    // synthetic coverage failure: pretend both taus are tiny
    SolutionPath a = p1, b = p2;
    a.tau = 0.1;
    b.tau = 0.2;
    CHECK_THROWS_AS(patch_solution({a, b}), coverage_error);
}

TEST_CASE("finite speed: restriction to a smaller box changes nothing on |x| <= A") {
    // base radius exceeds A + T by more than the interpolation smear
    // (max_iters * dx / 2), so the discrete dependence cone stays inside
    NoiseSpec spec = base_spec_d1(1.0, 5.0, 0.05, 4);
    InitialData init = InitialData::registry("constant-one");
    SigmaFn sig = SigmaFn::registry("linear");
    PicardOptions opts;
    opts.max_iters = 12;
    opts.force_full_iters = true;
    for (int rep = 0; rep < 5; ++rep) {
        NoiseRealization wide = sample_noise(spec, 500 + rep);
        NoiseRealization narrow = wide.restricted(2.5);
        Grid gw(1, spec.dt, spec.dx, 1.0, 1.0, 5.0);
        Grid gn(1, spec.dt, spec.dx, 1.0, 1.0, 2.5);
        SolutionPath pw = picard_solve(init, sig, wide, gw, opts);
        SolutionPath pn = picard_solve(init, sig, narrow, gn, opts);
        int shift = static_cast<int>(std::round((5.0 - 2.5) / spec.dx));
        for (int k = 0; k <= gn.nt(); ++k)
            for (int j = 0; j <= gn.nx(); ++j) {
                if (std::fabs(gn.x_of(j)) > 1.0) continue;
                CHECK(pn.u[k][j] == pw.u[k][j + shift]);
            }
    }
}

TEST_CASE("small-jump snapshots match the picard u1 component for sigma = 1") {
    NoiseSpec spec = base_spec_d1();
    NoiseRealization nr = sample_noise(spec, 99);
    Grid grid(1, spec.dt, spec.dx, 1.0, 1.0, 2.0);
    SolutionPath path = picard_solve(InitialData::registry("zero"),
                                     SigmaFn::registry("constant"), nr, grid, {});
    auto snaps = small_jump_snapshots(nr, grid, {grid.t_of(16), grid.t_of(64)});
    for (std::size_t j = 0; j < grid.points_per_slice(); ++j) {
        CHECK(snaps[0][j] == doctest::Approx(path.u1[16][j]).epsilon(1e-12));
        CHECK(snaps[1][j] == doctest::Approx(path.u1[64][j]).epsilon(1e-12));
    }
}
