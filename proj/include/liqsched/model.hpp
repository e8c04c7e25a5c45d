#pragma once

#include <cstddef>
#include <vector>

#include "liqsched/error.hpp"

namespace liqsched {

/// Nonnegative coefficient function on [0, T] (resilience rho or risk weight lambda).
///
/// Three representations, each with an exact sup-norm:
/// - Constant: a single value.
/// - PiecewiseConstant: breakpoints b_0 = 0 < ... < b_n = T with n values;
///   value v_i on [b_i, b_{i+1}), right-continuous, last value held at T.
/// - PiecewiseLinear: breakpoints b_0 = 0 < ... < b_n = T with n + 1 nodal
///   values, linear in between.
class CoefficientFn {
public:
    enum class Kind { Constant, PiecewiseConstant, PiecewiseLinear };

    CoefficientFn() = default;

    static CoefficientFn constant(double value);
    static CoefficientFn piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<double> values);
    static CoefficientFn piecewise_linear(std::vector<double> breakpoints,
                                          std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool is_constant() const noexcept;

    /// Right-continuous pointwise value. No range check; see eval_coefficients.
    double operator()(double t) const noexcept;

    /// Index of the piece containing t (right-continuous convention).
    std::size_t piece_at(double t) const noexcept;

    /// Value of piece `piece` extended to t. Used by integrators that must not
    /// pick up the neighbouring piece at a step endpoint.
    double in_piece(std::size_t piece, double t) const noexcept;

    /// Exact integral over [a, b] (a <= b, both inside the breakpoint span).
    double integral(double a, double b) const noexcept;

    double sup() const noexcept;
    double inf() const noexcept;

    /// Interior breakpoints strictly inside (0, T).
    std::vector<double> interior_breakpoints() const;

private:
    Kind kind_ = Kind::Constant;
    std::vector<double> breakpoints_;
    std::vector<double> values_{0.0};
};

/// Market-impact model: instantaneous impact eta, inverse depth gamma,
/// horizon T, resilience rho(t) and risk weight lambda(t).
struct ModelParams {
    double eta = 1.0;
    double gamma = 0.0;
    double horizon_T = 1.0;
    CoefficientFn rho;
    CoefficientFn lambda;
};

struct ProblemInstance {
    ModelParams model;
    double t0 = 0.0;
    double x0 = 1.0;
    double y0 = 0.0;
};

/// Constants of the near-terminal fixed-point construction: ball radius R,
/// Lipschitz bound L of the normalized driver on that ball, window length delta.
struct ContractionConstants {
    double R = 1.0;
    double L = 1.0;
    double delta = 0.5;
};

struct CoefficientValues {
    double rho = 0.0;
    double lambda = 0.0;
};

/// Returns `raw` unchanged when every model assumption holds, throws otherwise.
ModelParams validate_params(const ModelParams& raw);

void validate_instance(const ProblemInstance& instance);

/// kappa = sqrt(2 / eta * max{sup lambda, gamma * sup rho}).
double kappa(const ModelParams& model);

/// Unfloored ball radius 4 max{T sup lambda + gamma^2 T / eta + 2 gamma, sup rho}.
double ball_radius(const ModelParams& model);

/// Bound on the max-row-sum norm of the driver Jacobian over the weighted ball
/// of radius R, for time-to-go up to tau_max.
double driver_lipschitz_bound(const ModelParams& model, double R, double tau_max);

ContractionConstants contraction_constants(const ModelParams& model);

CoefficientValues eval_coefficients(const ModelParams& model, double t);

}  // namespace liqsched
