#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "liqsched/model.hpp"
#include "liqsched/numerics.hpp"

namespace liqsched {

/// Normalized near-terminal unknowns: with tau = T - t,
///   A = eta/tau + h_hat,  B = 1 + tau * g_hat,  C = tau^2 * p_hat,
/// i.e. (H, G, P) / tau^2 for the expansion A = eta/tau + H/tau^2,
/// B = 1 + G/tau, C = P.
struct TransformedState {
    double h_hat = 0.0;
    double g_hat = 0.0;
    double p_hat = 0.0;
};

struct SolverConfig {
    double t0 = 0.0;
    std::size_t n_regular = 2001;
    /// 60 octaves below delta at 8 nodes per octave.
    std::size_t n_singular = 481;
    double ratio = 0.917004043204671;  // 2^(-1/8)
    std::optional<double> delta_override;
    double picard_tol = 1e-12;
    int picard_max_iter = 60;
    int max_halvings = 6;
    /// Backward RK4 substeps satisfy h * (2|D| + 2 gamma E + 2 sup rho) <= this.
    double rk_step_fraction = 0.02;
};

/// Right-hand side of the normalized terminal system at time-to-go tau, in
/// the units of (H, G, P): finite for every tau >= 0 and zero at tau = 0.
/// `rho`, `lambda` are the coefficient values at T - tau.
std::array<double, 3> transformed_driver_tau(double eta, double gamma, double rho,
                                             double lambda, double tau,
                                             const TransformedState& s);

std::array<double, 3> transformed_driver(const ModelParams& model, double t,
                                         const TransformedState& s);

struct NearTerminalSolution {
    std::vector<double> tau;               ///< delta = tau[0] > ... > tau.back() = 0
    std::vector<TransformedState> state;   ///< aligned with tau; last entry is the tau -> 0 limit
    int iterations = 0;
    std::vector<double> increment_ratios;  ///< successive weighted-norm increment ratios
    double weighted_norm = 0.0;            ///< sup of max(|h|,|g|,|p|) over the window
};

/// Picard iteration Y <- integral_t^T f(s, Y_s) ds on the terminal window of
/// `grid`, started from zero. Throws NoContraction when increments grow twice
/// in a row, the iterate leaves the radius-R ball, or the cap is reached.
NearTerminalSolution solve_near_terminal(const ModelParams& model,
                                         const ContractionConstants& consts,
                                         const TimeGrid& grid, double tol,
                                         int max_iter = 60);

/// Backward RK4 extension from the node at T - delta down to the first grid
/// node. Boundary and result are in excess form (A - eta/tau, B - 1, C);
/// the result is aligned with grid nodes 0 .. window_begin.
std::vector<std::array<double, 3>> extend_backward(const ModelParams& model,
                                                   const std::array<double, 3>& boundary,
                                                   const TimeGrid& grid,
                                                   double rk_step_fraction = 0.02);

struct RiccatiPoint {
    double A, B, C, D, E;
};

/// Sampled solution of the singular Riccati system on a grid clustered at T.
///
/// Besides (A, B, C, D, E) the nonsingular parts A - eta/tau, B - 1 and
/// D - 1/tau are stored per node. The terminal node stores the limits
/// (inf, 1, 0, inf, 0).
class RiccatiSolution {
public:
    RiccatiSolution() = default;

    /// Assembles a solution from per-node data and builds the interpolants.
    RiccatiSolution(ModelParams model, TimeGrid grid, std::vector<double> A_excess,
                    std::vector<double> B_excess, std::vector<double> C);

    const ModelParams& model() const noexcept { return model_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    double delta() const noexcept { return grid_.sing_window; }
    std::size_t size() const noexcept { return grid_.size(); }

    const std::vector<double>& A() const noexcept { return A_; }
    const std::vector<double>& B() const noexcept { return B_; }
    const std::vector<double>& C() const noexcept { return C_; }
    const std::vector<double>& D() const noexcept { return D_; }
    const std::vector<double>& E() const noexcept { return E_; }
    const std::vector<double>& A_excess() const noexcept { return A_exc_; }
    const std::vector<double>& B_excess() const noexcept { return B_exc_; }
    const std::vector<double>& D_excess() const noexcept { return D_exc_; }

    /// Interpolated values at time-to-go tau in (0, T - t0].
    RiccatiPoint at_tau(double tau) const;
    RiccatiPoint at(double t) const;
    double D_excess_at_tau(double tau) const;

    // Solver diagnostics.
    ContractionConstants constants;
    int picard_iterations = 0;
    std::vector<double> contraction_ratios;
    int delta_halvings = 0;

private:
    ModelParams model_;
    TimeGrid grid_;
    std::vector<double> A_, B_, C_, D_, E_;
    std::vector<double> A_exc_, B_exc_, D_exc_;
    MonotoneCubic interp_A_exc_, interp_B_exc_, interp_C_, interp_D_exc_, interp_E_;
};

RiccatiSolution solve_riccati(const ModelParams& model, const SolverConfig& config = {});

// A priori envelopes at time-to-go tau (tau > 0).
double d_lower_bound(const ModelParams& model, double tau);
double d_upper_bound(const ModelParams& model, double tau);
double b_lower_bound(const ModelParams& model, double tau);
/// +infinity when gamma == 0.
double e_upper_bound(const ModelParams& model, double tau);

struct CheckRecord {
    std::string name;
    double worst_margin = 0.0;
    double location_t = 0.0;
    double location_tau = 0.0;
    double value = 0.0;  ///< measured quantity, when the check has one
    bool pass = true;
};

struct ValidationReport {
    std::vector<CheckRecord> checks;
    double tolerance = 0.0;

    bool all_pass() const noexcept;
    const CheckRecord* find(const std::string& name) const noexcept;
};

/// Two-sided envelopes for D, B, E and the sign/range constraints on
/// A, B, D, -gamma C, eta E at every node before T. Margins are relative to
/// max(1, |envelope|) so they stay meaningful where D ~ 1/tau.
ValidationReport check_a_priori_bounds(const RiccatiSolution& sol, double tol);

/// Boundary-layer orders in the terminal window: sup over dyadic bands of
/// |A - eta/tau|, |B - 1| / tau and |C| / tau^3 must not grow by more than
/// 1.5x from one band to the next closer to T.
ValidationReport check_asymptotics(const RiccatiSolution& sol, int bands = 20);

}  // namespace liqsched
