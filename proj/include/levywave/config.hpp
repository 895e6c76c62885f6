#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levywave/noise.hpp"
#include "levywave/sobolev.hpp"
#include "levywave/solver.hpp"

#include <json.hpp>

namespace levywave {

struct WindowSpec {
    double center = 0.0;
    double radius = 1.0;
};

/// Experiment description: noise + equation + grid + analysis + run + output.
/// Cross-field invariants are validated with actionable messages before any
/// run touches them.
struct ExperimentConfig {
    // noise
    std::string measure_kind = "stable";
    double alpha = 1.5, c_plus = 1.0, c_minus = 1.0;
    double epsilon = 1e-2;
    std::vector<int> levels = {1};
    double eta = 1.5;
    double drift = 0.0;
    bool gaussian_correction = false;
    // equation
    int dim = 1;
    std::string sigma_name = "linear";
    std::string initial_name = "constant-one";
    double p = 2.0, q = 1.0;
    // grid
    double horizon = 1.0;      // T
    double eval_radius = 1.0;  // A
    double radius = 2.0;       // R
    double dt = 1.0 / 64, dx = 1.0 / 16;
    // analysis
    std::vector<double> r_list{0.0};
    std::vector<double> h_list{0.25, 0.125, 0.0625, 0.03125};
    std::vector<WindowSpec> windows{{0.0, 1.0}};
    double band_radius = 200.0;
    // run
    std::uint64_t seed = 1;
    int replicates = 10000;
    double tolerance = 1e-6;
    int max_iters = 100;
    // output
    std::string out_dir = "out";
    std::string snapshot_format = "csv";  // csv | bin

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
    std::uint64_t hash() const;

    LevyMeasure measure() const;
    AssumptionA assumption() const;
    TruncationSpec trunc(int level) const;
    SimWindow window() const;
    Grid grid() const;
    NoiseSpec noise_spec(int level) const;
    InitialData initial() const;
    SigmaFn sigma() const;
};

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

} // namespace levywave
