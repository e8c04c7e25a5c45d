#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "liqsched/battery.hpp"
#include "liqsched/model.hpp"
#include "liqsched/riccati.hpp"
#include "liqsched/strategy.hpp"

namespace liqsched {

/// Parameter lists for `sweep`; an absent list keeps the base value.
struct SweepSpec {
    std::optional<std::vector<double>> eta, gamma, rho, lambda;
};

struct RunConfig {
    ModelParams model;
    ProblemInstance instance;
    SolverConfig solver;
    SimulationOptions simulation{4, 1e-6};
    std::size_t oracle_N = 2000;
    std::filesystem::path output_dir = "out";
    double validate_tol = 1e-8;
    /// Fraction of T trimmed at each end when measuring the OW gap.
    double ow_trim = 0.01;
    std::optional<SweepSpec> sweep;
    std::optional<BatterySpec> battery;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> solution_csv;
};

/// Parses a JSON document. Structural problems throw BadConfig; model
/// validation is left to the commands.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace liqsched
