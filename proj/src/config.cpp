#include "levywave/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace levywave {

using nlohmann::json;

namespace {

template <class T>
void pull(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        pull(n, "kind", c.measure_kind);
        pull(n, "alpha", c.alpha);
        pull(n, "c_plus", c.c_plus);
        pull(n, "c_minus", c.c_minus);
        pull(n, "epsilon", c.epsilon);
        pull(n, "levels", c.levels);
        pull(n, "eta", c.eta);
        pull(n, "drift", c.drift);
        pull(n, "gaussian_correction", c.gaussian_correction);
    }
    if (j.contains("equation")) {
        const json& e = j.at("equation");
        pull(e, "dimension", c.dim);
        pull(e, "sigma", c.sigma_name);
        pull(e, "initial", c.initial_name);
        pull(e, "p", c.p);
        pull(e, "q", c.q);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        pull(g, "T", c.horizon);
        pull(g, "A", c.eval_radius);
        pull(g, "R", c.radius);
        pull(g, "dt", c.dt);
        pull(g, "dx", c.dx);
    }
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        pull(a, "r", c.r_list);
        pull(a, "h", c.h_list);
        pull(a, "band_radius", c.band_radius);
        if (a.contains("windows")) {
            c.windows.clear();
            for (const auto& w : a.at("windows"))
                c.windows.push_back({w.at("center").get<double>(), w.at("radius").get<double>()});
        }
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        pull(r, "seed", c.seed);
        pull(r, "replicates", c.replicates);
        pull(r, "tolerance", c.tolerance);
        pull(r, "max_iters", c.max_iters);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        pull(o, "directory", c.out_dir);
        pull(o, "snapshots", c.snapshot_format);
    }
    c.validate();
    return c;
}

json ExperimentConfig::to_json() const {
    json w_arr = json::array();
    for (const auto& w : windows) w_arr.push_back({{"center", w.center}, {"radius", w.radius}});
    return json{
        {"noise",
         {{"kind", measure_kind},
          {"alpha", alpha},
          {"c_plus", c_plus},
          {"c_minus", c_minus},
          {"epsilon", epsilon},
          {"levels", levels},
          {"eta", eta},
          {"drift", drift},
          {"gaussian_correction", gaussian_correction}}},
        {"equation",
         {{"dimension", dim},
          {"sigma", sigma_name},
          {"initial", initial_name},
          {"p", p},
          {"q", q}}},
        {"grid",
         {{"T", horizon}, {"A", eval_radius}, {"R", radius}, {"dt", dt}, {"dx", dx}}},
        {"analysis",
         {{"r", r_list}, {"h", h_list}, {"windows", w_arr}, {"band_radius", band_radius}}},
        {"run",
         {{"seed", seed},
          {"replicates", replicates},
          {"tolerance", tolerance},
          {"max_iters", max_iters}}},
        {"output", {{"directory", out_dir}, {"snapshots", snapshot_format}}}};
}

void ExperimentConfig::validate() const {
    require(measure_kind == "stable", "noise.kind: only 'stable' is configurable here");
    require(dim == 1 || dim == 2, "equation.dimension must be 1 or 2");
    if (radius + 1e-12 < eval_radius + horizon) {
        std::ostringstream os;
        os << "grid.R must satisfy R >= A + T (finite speed of propagation): R=" << radius
           << " but A + T = " << eval_radius + horizon;
        throw std::invalid_argument(os.str());
    }
    require(epsilon > 0.0 && epsilon <= 1.0, "noise.epsilon must lie in (0,1]");
    require(!levels.empty(), "noise.levels must name at least one truncation level");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        require(levels[i] >= 1, "noise.levels entries must be >= 1");
        if (i) require(levels[i] > levels[i - 1], "noise.levels must be strictly increasing");
    }
    if (dim == 2 && p >= 2.0)
        throw std::invalid_argument("equation.p must be < 2 when dimension = 2 (kernel mass)");

    // Assumption A must hold for the configured measure; this throws a
    // divergence error naming the failing integral if not.
    LevyMeasure m = measure();
    AssumptionA a = moment_functionals(m, p, q, drift);
    if (a.no_drift_mode() && std::fabs(drift - a.drift) > 1e-9 * (1.0 + std::fabs(a.drift))) {
        std::ostringstream os;
        os << "noise.drift: for p < 1 the drift is pinned to int_{|z|<=1} z nu(dz) = "
           << a.drift << ", got " << drift;
        throw std::invalid_argument(os.str());
    }
    if (eta * m.tail_exponent() <= dim)
        throw std::invalid_argument(
            "noise.eta too small: eta * alpha must exceed the dimension for finite "
            "exceedance rates");
    // grid divisibility
    (void)grid();
    (void)sigma();
    (void)initial();
    require(replicates >= 1, "run.replicates must be >= 1");
    require(tolerance > 0.0, "run.tolerance must be > 0");
    require(max_iters >= 1, "run.max_iters must be >= 1");
    require(snapshot_format == "csv" || snapshot_format == "bin",
            "output.snapshots must be 'csv' or 'bin'");
    for (const auto& w : windows)
        require(w.radius > 0.0, "analysis.windows radii must be > 0");
    require(band_radius > 1.0, "analysis.band_radius must exceed 1");
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(to_json().dump()); }

LevyMeasure ExperimentConfig::measure() const {
    return LevyMeasure::stable(alpha, c_plus, c_minus);
}

AssumptionA ExperimentConfig::assumption() const {
    return moment_functionals(measure(), p, q, drift);
}

TruncationSpec ExperimentConfig::trunc(int level) const { return TruncationSpec(level, eta); }

SimWindow ExperimentConfig::window() const { return SimWindow(horizon, radius, dim); }

Grid ExperimentConfig::grid() const {
    return Grid(dim, dt, dx, horizon, eval_radius, radius);
}

NoiseSpec ExperimentConfig::noise_spec(int level) const {
    NoiseSpec spec;
    spec.measure = measure();
    spec.assumption = assumption();
    spec.trunc = trunc(level);
    spec.window = window();
    spec.epsilon = epsilon;
    spec.dt = dt;
    spec.dx = dx;
    spec.gaussian_correction = gaussian_correction;
    return spec;
}

InitialData ExperimentConfig::initial() const { return InitialData::registry(initial_name); }

SigmaFn ExperimentConfig::sigma() const { return SigmaFn::registry(sigma_name); }

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write config file: " + path);
    out << cfg.to_json().dump(2) << "\n";
}

} // namespace levywave
