#pragma once

#include <iosfwd>

#include "liqsched/config.hpp"

namespace liqsched {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitFailure = 2 };

// Each command writes its files under cfg.output_dir and returns an exit code.
// Failures of the model or the numerics produce a JSON report carrying the
// error name and exit code 2.
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_compare(const RunConfig& cfg, std::ostream& log);
int cmd_validate(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);

struct CompareResult {
    double ow_gap = 0.0;       ///< sup |X - X_OW| on [trim T, (1 - trim) T]
    double ow_gap_open = 0.0;  ///< same over every node of (0, T)
    double ac_gap = 0.0;       ///< sup |X - X_AC| over all nodes
    double ow_rho = 0.0;       ///< resilience used for the OW reference
};

/// Gaps between a simulated path and the two reference schedules.
CompareResult compare_paths(const ModelParams& model, const Trajectory& traj, double x0,
                            double trim);

}  // namespace liqsched
