#pragma once

#include <string>
#include <vector>

#include "levywave/config.hpp"

namespace levywave {

struct RunReport {
    int exit_code = 0;
    int checks_run = 0;
    int checks_passed = 0;
    std::vector<std::string> artifacts;
};

/// command in {simulate, verify-kernels, verify-moments, sobolev, all};
/// artifacts land under cfg.out_dir, indexed by a manifest carrying the
/// config hash and seed. Numeric payloads are byte-deterministic in
/// (config, seed).
RunReport run_command(const std::string& command, const ExperimentConfig& cfg);

/// Re-emits stored artifacts as tidy plot data. Selections: profiles,
/// increments, fits, moments. Unknown artifacts raise a lookup error.
RunReport emit_plot_data(const std::string& artifact_dir,
                         const std::vector<std::string>& selection,
                         const std::string& out_dir);

} // namespace levywave
