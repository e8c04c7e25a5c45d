#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "liqsched/oracle.hpp"
#include "liqsched/riccati.hpp"
#include "liqsched/strategy.hpp"

namespace liqsched {

/// 17 significant digits; `inf` and `nan` spelled out.
std::string format_double(double x);

/// Columns t, A, B, C, D, E. Rows whose t does not advance (double precision
/// collapses t onto T deep inside the terminal window) are skipped; the final
/// row is t = T with inf for A and D.
void write_riccati_csv(const std::filesystem::path& path, const RiccatiSolution& sol);

struct RiccatiTable {
    std::vector<double> t, A, B, C, D, E;
};

RiccatiTable read_riccati_csv(const std::filesystem::path& path);

/// Rebuilds a solution from a table, keeping rows with T - t >= min_tau.
RiccatiSolution solution_from_table(const ModelParams& model, const RiccatiTable& table,
                                    double min_tau);

/// Columns t, X, Y, xi with the same row rule as write_riccati_csv.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Columns k, t_k, xi_k, X_k, Y_k (xi blank on the last row).
void write_discrete_csv(const std::filesystem::path& path, const DiscreteStrategy& ds);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace liqsched
