#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "liqsched/model.hpp"
#include "liqsched/riccati.hpp"

namespace liqsched {

struct CostBreakdown {
    double instantaneous = 0.0;  ///< integral of eta xi^2 / 2
    double persistent = 0.0;     ///< integral of xi Y
    double risk = 0.0;           ///< integral of lambda X^2 / 2
    double total = 0.0;
};

/// Sampled state path. `tau` mirrors `t` as time-to-go and is exact near T.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> tau;
    std::vector<double> X;
    std::vector<double> Y;
    std::vector<double> xi;
    double realized_cost = 0.0;

    std::size_t size() const noexcept { return t.size(); }
};

struct SimulationOptions {
    /// Each solver interval is split into this many propagation steps.
    std::size_t substeps = 1;
    /// |X| at the last node before T must not exceed tol * max(1, |x0|).
    double terminal_tol = 1e-6;
};

/// D_t x - E_t y.
double feedback_rate(const RiccatiSolution& sol, double t, double x, double y);

/// A_t x^2 / 2 + B_t x y + C_t y^2 / 2.
double value_function(const RiccatiSolution& sol, double t, double x, double y);

/// Closed-loop path of (X, Y) from instance.t0 on the solver grid, with an
/// exact exponential of the frozen 2x2 system matrix on every step. The last
/// step into T removes the remaining inventory, so X(T) = 0.
Trajectory simulate_optimal(const RiccatiSolution& sol, const ProblemInstance& instance,
                            const SimulationOptions& options = {});

/// Trapezoidal running cost along the path.
CostBreakdown cost_of_trajectory(const ModelParams& model, const Trajectory& traj);

/// max |X(t)| / (T - t) over nodes strictly before T.
double max_decay_ratio(const Trajectory& traj);

double min_rate(const Trajectory& traj);

/// Linear interpolation of X at time t.
double inventory_at(const Trajectory& traj, double t);

/// Open-loop perturbation xi + eps * phi of a simulated path. phi must vanish
/// outside (t0, T) and integrate to zero; X(T) = 0 is kept. `Phi` is
/// its running integral from t0. Y is updated by integrating the linear
/// response dZ = (-rho Z + gamma phi) dt.
Trajectory perturb_trajectory(const ModelParams& model, const Trajectory& base,
                              const std::function<double(double)>& phi,
                              const std::function<double(double)>& Phi, double eps);

/// Mean-zero sine bump on [a, b]: phi(t) = amp sin(2 pi (t - a) / (b - a)).
struct SineBump {
    double a = 0.0;
    double b = 1.0;
    double amp = 1.0;

    double operator()(double t) const;
    double integral(double t) const;  ///< integral of phi from a to t
};

/// exp(M) for a real 2x2 matrix whose eigenvalues have nonpositive real part.
std::array<double, 4> expm2(const std::array<double, 4>& M);

}  // namespace liqsched
