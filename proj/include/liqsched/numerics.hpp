#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "liqsched/error.hpp"

namespace liqsched {

/// Time grid on [t0, T] whose last node is T, geometrically refined toward T.
///
/// Nodes are stored twice: as calendar time `t` and as time-to-go `tau = T - t`.
/// Deep inside the terminal window tau underflows the resolution of t (for
/// T = 1, tau below ~1e-16 rounds t to T), so `tau` is authoritative there and
/// consumers that need distances to T must read it instead of subtracting.
struct TimeGrid {
    double t0 = 0.0;
    double T = 1.0;
    double sing_window = 0.0;       ///< delta: [T - delta, T] is geometric
    double ratio = 0.5;             ///< gap ratio inside the window
    std::size_t window_begin = 0;   ///< index of the node with tau == delta
    std::vector<double> t;
    std::vector<double> tau;

    std::size_t size() const noexcept { return tau.size(); }
    bool is_terminal(std::size_t i) const noexcept { return tau[i] == 0.0; }
    const std::vector<double>& nodes() const noexcept { return t; }
};

/// Values sampled on a grid; values[i] belongs to node i.
struct SampledFunction {
    TimeGrid grid;
    std::vector<std::vector<double>> values;
};

/// Uniform nodes on [t0, T - delta] (n_regular of them, collapsing to one when
/// the interval is empty), then n_singular further nodes tau_k = delta * ratio^k,
/// k = 1 .. n_singular - 1, and finally T itself.
TimeGrid make_grid(double t0, double T, double delta, std::size_t n_regular,
                   std::size_t n_singular, double ratio);

/// Grid used by the Riccati solver. Same terminal window as make_grid, but the
/// geometric grading continues past T - delta until the gaps reach the regular
/// spacing (T - t0) / (n_regular - 1), so a tiny delta does not leave a
/// coarse jump between the uniform part and the window. Every entry of
/// `extra_t` inside (t0, T - delta) becomes a node.
TimeGrid make_solver_grid(double t0, double T, double delta, std::size_t n_regular,
                          std::size_t n_singular, double ratio,
                          std::span<const double> extra_t = {});

using VectorField = std::function<std::vector<double>(double, const std::vector<double>&)>;

/// Classical RK4 with n_steps equal steps; t_to < t_from integrates backward.
std::vector<double> integrate_rk4(const VectorField& field, double t_from, double t_to,
                                  std::vector<double> y0, std::size_t n_steps);

/// One classical RK4 step of size h (may be negative) for fixed-size states.
template <std::size_t N, class Field>
std::array<double, N> rk4_step(const Field& field, double t, const std::array<double, N>& y,
                               double h) {
    auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
        std::array<double, N> r{};
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const auto k1 = field(t, y);
    const auto k2 = field(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const auto k3 = field(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const auto k4 = field(t + h, axpy(y, h, k3));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(out[i])) {
            throw Error(ErrorCode::NonFiniteField, "RK4 state became non-finite");
        }
    }
    return out;
}

/// Dense solve with partial pivoting.
Eigen::VectorXd solve_dense_linear(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Shape-preserving piecewise-cubic Hermite interpolant (Fritsch-Carlson
/// slopes with the Fritsch-Butland harmonic mean). Abscissae strictly increasing.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double x_min() const noexcept { return x_.front(); }
    double x_max() const noexcept { return x_.back(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;
};

/// Monotone cubic interpolation of every component of f at time t.
std::vector<double> interp_eval(const SampledFunction& f, double t);

/// Cumulative integral of samples g_0..g_{n-1} on a uniform grid of spacing h,
/// fourth order (cubic Lagrange per interval, one-sided at the ends).
/// Returns I with I_0 = 0 and I_k = integral from x_0 to x_k. Needs n >= 4.
std::vector<double> cumulative_quad4(std::span<const double> g, double h);

}  // namespace liqsched
