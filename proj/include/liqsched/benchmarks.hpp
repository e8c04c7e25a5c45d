#pragma once

#include "liqsched/model.hpp"
#include "liqsched/numerics.hpp"
#include "liqsched/strategy.hpp"

namespace liqsched {

/// Block-rate-block schedule of the resilient limit-order-book model.
struct OWSchedule {
    double initial_block = 0.0;
    double rate = 0.0;
    double terminal_block = 0.0;
    double x0 = 0.0;
    double T = 1.0;

    /// Continuous inventory on the open interval (0, T): x0 - block - rate t.
    double inventory(double t) const;
};

/// X(t) = x0 sinh(k (T - t)) / sinh(k (T - t0)), k = sqrt(lambda/eta), on the
/// nodes of `grid`; linear when lambda = 0. Y stays 0.
Trajectory almgren_chriss_trajectory(double eta, double lambda_const, double T, double x0,
                                     const TimeGrid& grid);

/// Same reference for any lambda(t): closed form when constant, otherwise
/// X = x0 exp(-int D) with D = A~ / eta from the scalar solve.
Trajectory almgren_chriss_reference(double eta, const CoefficientFn& lambda, double T, double x0,
                                    const TimeGrid& grid);

OWSchedule obizhaeva_wang_schedule(double rho_const, double T, double x0);

/// Singular scalar Riccati solution A~ with -dA~ = (lambda - A~^2/eta) dt and
/// A~ -> infinity at T. Each sample holds {A~, A~ - eta/tau}; the terminal
/// node holds {inf, 0}.
SampledFunction scalar_A_tilde(double eta, const CoefficientFn& lambda, double T,
                               const TimeGrid& grid);

/// A~ at a single time-to-go tau > 0.
double scalar_A_tilde_at(double eta, const CoefficientFn& lambda, double T, double tau);

/// (A~_t + gamma) x^2 / 2 + x y.
double rho_zero_value(double eta, double gamma, const CoefficientFn& lambda, double T, double t,
                      double x, double y);

}  // namespace liqsched
