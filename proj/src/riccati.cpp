#include "liqsched/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace liqsched {

std::array<double, 3> transformed_driver_tau(double eta, double gamma, double rho,
                                             double lambda, double tau,
                                             const TransformedState& s) {
    // H = tau^2 h, G = tau^2 g, P = tau^2 p. Every 1/tau in the driver meets a
    // tau^2 weight, leaving
    //   u / tau = h - gamma - gamma tau g,   v / tau = gamma tau p - g
    // with u = H/tau - gamma (tau + G) and v = gamma P - G/tau.
    const double u_over = s.h_hat - gamma - gamma * tau * s.g_hat;
    const double v_over = gamma * tau * s.p_hat - s.g_hat;
    const double tau2 = tau * tau;
    const double f_h = tau2 * lambda - tau2 / eta * u_over * u_over
                       + 2.0 * gamma * tau * (1.0 + tau * s.g_hat);
    const double f_g = -rho * tau * (1.0 + tau * s.g_hat) + tau2 / eta * v_over * u_over
                       + gamma * tau2 * s.p_hat;
    const double f_p = -2.0 * rho * tau2 * s.p_hat - tau2 / eta * v_over * v_over;
    return {f_h, f_g, f_p};
}

std::array<double, 3> transformed_driver(const ModelParams& model, double t,
                                         const TransformedState& s) {
    const double tau = model.horizon_T - t;
    if (tau <= 0.0) {
        return {0.0, 0.0, 0.0};
    }
    return transformed_driver_tau(model.eta, model.gamma, model.rho(t), model.lambda(t), tau, s);
}

namespace {

// Cumulative integral in u = log s of g(u) = e^{alpha u} q(u), with q = g / s^alpha
// interpolated by cubics on four-node stencils and the exponential factor
// integrated exactly. Nodes s are geometric with log-spacing h.
std::vector<double> cumulative_exp_fitted(const std::vector<double>& g,
                                          const std::vector<double>& s, double h,
                                          double alpha) {
    const std::size_t m = g.size();
    using Stencil = std::array<int, 4>;
    auto weights = [&](const Stencil& o) {
        std::array<double, 4> w{};
        const int n_sub = 64;
        for (int k = 0; k <= n_sub; ++k) {
            const double x = static_cast<double>(k) / n_sub;
            const double sw = (k == 0 || k == n_sub) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            const double e = std::exp(alpha * h * x);
            for (int j = 0; j < 4; ++j) {
                double L = 1.0;
                for (int i = 0; i < 4; ++i) {
                    if (i != j) L *= (x - o[i]) / static_cast<double>(o[j] - o[i]);
                }
                w[j] += sw * e * L;
            }
        }
        for (double& v : w) v *= h / (3.0 * n_sub);
        return w;
    };
    const Stencil first{0, 1, 2, 3}, mid{-1, 0, 1, 2}, last{-2, -1, 0, 1};
    const auto w_first = weights(first), w_mid = weights(mid), w_last = weights(last);

    std::vector<double> out(m, 0.0);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const bool at_start = k == 0;
        const bool at_end = k + 2 == m;
        const Stencil& o = at_start ? first : (at_end ? last : mid);
        const auto& w = at_start ? w_first : (at_end ? w_last : w_mid);
        double piece = 0.0;
        for (int j = 0; j < 4; ++j) {
            const std::size_t idx = static_cast<std::size_t>(static_cast<long>(k) + o[j]);
            piece += w[j] * g[idx] * std::pow(s[k] / s[idx], alpha);
        }
        out[k + 1] = out[k] + piece;
    }
    return out;
}

}  // namespace

NearTerminalSolution solve_near_terminal(const ModelParams& model,
                                         const ContractionConstants& consts,
                                         const TimeGrid& grid, double tol, int max_iter) {
    const std::size_t first = grid.window_begin;
    const std::size_t n = grid.size();
    if (n - first < 5 || grid.tau.back() != 0.0) {
        throw Error(ErrorCode::BadGridSpec, "terminal window needs at least 4 interior nodes");
    }
    // Quadrature nodes: positive tau, increasing (closest to T first).
    const std::size_t m = n - 1 - first;
    std::vector<double> s(m);
    std::vector<double> rho(m), lambda(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t node = n - 2 - i;
        s[i] = grid.tau[node];
        const double t = grid.T - s[i];
        rho[i] = model.rho(t);
        lambda[i] = model.lambda(t);
    }
    const double h_u = std::log(s[1] / s[0]);

    std::vector<TransformedState> y(m), y_next(m);
    std::vector<double> g_h(m), g_g(m), g_p(m);
    NearTerminalSolution out;
    double prev_increment = -1.0;
    int growth_streak = 0;
    bool converged = false;
    const double noise = 1e3 * std::numeric_limits<double>::epsilon();

    for (int iter = 1; iter <= max_iter; ++iter) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto f = transformed_driver_tau(model.eta, model.gamma, rho[i], lambda[i], s[i], y[i]);
            // d tau = tau d(log tau)
            g_h[i] = s[i] * f[0];
            g_g[i] = s[i] * f[1];
            g_p[i] = s[i] * f[2];
        }
        // g_h, g_g ~ tau^2 and g_p ~ tau^3 near T.
        const auto I_h = cumulative_exp_fitted(g_h, s, h_u, 2.0);
        const auto I_g = cumulative_exp_fitted(g_g, s, h_u, 2.0);
        const auto I_p = cumulative_exp_fitted(g_p, s, h_u, 3.0);
        // [0, s_0] with the same power laws.
        const double base_h = g_h[0] / 2.0;
        const double base_g = g_g[0] / 2.0;
        const double base_p = g_p[0] / 3.0;

        double increment = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = 1.0 / (s[i] * s[i]);
            y_next[i] = {(base_h + I_h[i]) * w, (base_g + I_g[i]) * w, (base_p + I_p[i]) * w};
            increment = std::max({increment, std::abs(y_next[i].h_hat - y[i].h_hat),
                                  std::abs(y_next[i].g_hat - y[i].g_hat),
                                  std::abs(y_next[i].p_hat - y[i].p_hat)});
            norm = std::max({norm, std::abs(y_next[i].h_hat), std::abs(y_next[i].g_hat),
                             std::abs(y_next[i].p_hat)});
        }
        y.swap(y_next);
        out.iterations = iter;
        out.weighted_norm = norm;

        if (!std::isfinite(norm) || norm > consts.R * (1.0 + 1e-9)) {
            std::ostringstream os;
            os << "iterate left the ball of radius " << consts.R << " (norm " << norm << ")";
            throw Error(ErrorCode::NoContraction, os.str());
        }
        if (prev_increment > 0.0) {
            const double ratio = increment / prev_increment;
            out.increment_ratios.push_back(ratio);
            growth_streak = ratio > 1.0 ? growth_streak + 1 : 0;
            if (growth_streak >= 2) {
                throw Error(ErrorCode::NoContraction, "Picard increments grew twice in a row");
            }
        }
        const double scale = std::max(1.0, norm);
        if (increment <= tol * scale || increment <= noise * scale) {
            converged = true;
            break;
        }
        prev_increment = increment;
    }
    if (!converged) {
        throw Error(ErrorCode::NoContraction, "Picard iteration cap reached");
    }

    out.tau.assign(grid.tau.begin() + static_cast<std::ptrdiff_t>(first), grid.tau.end());
    out.state.resize(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        out.state[m - 1 - i] = y[i];
    }
    out.state[m] = y[0];
    return out;
}

std::vector<std::array<double, 3>> extend_backward(const ModelParams& model,
                                                   const std::array<double, 3>& boundary,
                                                   const TimeGrid& grid,
                                                   double rk_step_fraction) {
    for (double v : boundary) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::BlowUp, "non-finite boundary value at T - delta");
        }
    }
    const double eta = model.eta;
    const double gamma = model.gamma;
    const double T = model.horizon_T;
    const double rho_sup = model.rho.sup();
    const std::size_t last = grid.window_begin;
    std::vector<std::array<double, 3>> out(last + 1);
    out[last] = boundary;

    // State (a, b, C) = (A - eta/tau, B - 1, C), integrated in time-to-go:
    //   da/dtau = lambda - 2 (a - gamma B) / tau - (a - gamma B)^2 / eta
    //   db/dtau = -rho B + (gamma C - b) D
    //   dC/dtau = -2 rho C - (gamma C - b)^2 / eta
    std::array<double, 3> y = boundary;
    for (std::size_t node = last; node-- > 0;) {
        const double tau_lo = grid.tau[node + 1];
        const double tau_hi = grid.tau[node];
        // Coefficients are locked to the piece containing the step midpoint so
        // a breakpoint at an endpoint never leaks into the neighbouring step.
        const double t_mid = T - 0.5 * (tau_lo + tau_hi);
        const std::size_t rho_piece = model.rho.piece_at(t_mid);
        const std::size_t lam_piece = model.lambda.piece_at(t_mid);
        auto field = [&](double tau, const std::array<double, 3>& s) {
            const double t = T - tau;
            const double rho = model.rho.in_piece(rho_piece, t);
            const double lambda = model.lambda.in_piece(lam_piece, t);
            const double B = 1.0 + s[1];
            const double w = s[0] - gamma * B;
            const double Ebar = gamma * s[2] - s[1];
            const double D = 1.0 / tau + w / eta;
            return std::array<double, 3>{lambda - 2.0 * w / tau - w * w / eta,
                                         -rho * B + Ebar * D,
                                         -2.0 * rho * s[2] - Ebar * Ebar / eta};
        };
        const double gap = tau_hi - tau_lo;
        const double D = 1.0 / tau_lo + (y[0] - gamma * (1.0 + y[1])) / eta;
        const double E = (gamma * y[2] - y[1]) / eta;
        const double stiffness = 2.0 * std::abs(D) + 2.0 * gamma * std::abs(E) + 2.0 * rho_sup;
        double h_max = rk_step_fraction * tau_lo;
        if (stiffness > 0.0) {
            h_max = std::min(h_max, rk_step_fraction / stiffness);
        }
        const auto n_sub = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / h_max)));
        const double h = gap / static_cast<double>(n_sub);
        try {
            for (std::size_t k = 0; k < n_sub; ++k) {
                y = rk4_step<3>(field, tau_lo + h * static_cast<double>(k), y, h);
            }
        } catch (const Error&) {
            throw Error(ErrorCode::BlowUp, "backward extension produced non-finite values");
        }
        const double A = eta / tau_hi + y[0];
        const double A_cap = 10.0 * (eta * d_upper_bound(model, tau_hi) + gamma);
        const double C_cap = 10.0 * (gamma > 0.0 ? std::min(1.0 / gamma, tau_hi / eta) : tau_hi / eta);
        if (std::abs(A) > A_cap || std::abs(1.0 + y[1]) > 10.0 || std::abs(y[2]) > C_cap) {
            std::ostringstream os;
            os << "state left 10x its a priori envelope at t = " << grid.t[node];
            throw Error(ErrorCode::BlowUp, os.str());
        }
        out[node] = y;
    }
    return out;
}

RiccatiSolution::RiccatiSolution(ModelParams model, TimeGrid grid, std::vector<double> A_excess,
                                 std::vector<double> B_excess, std::vector<double> C)
    : model_(std::move(model))
    , grid_(std::move(grid))
    , C_(std::move(C))
    , A_exc_(std::move(A_excess))
    , B_exc_(std::move(B_excess)) {
    const std::size_t n = grid_.size();
    const double eta = model_.eta;
    const double gamma = model_.gamma;
    const double inf = std::numeric_limits<double>::infinity();
    A_.resize(n);
    B_.resize(n);
    D_.resize(n);
    E_.resize(n);
    D_exc_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = grid_.tau[i];
        D_exc_[i] = (A_exc_[i] - gamma * (1.0 + B_exc_[i])) / eta;
        B_[i] = 1.0 + B_exc_[i];
        E_[i] = (gamma * C_[i] - B_exc_[i]) / eta;
        if (tau > 0.0) {
            A_[i] = eta / tau + A_exc_[i];
            D_[i] = 1.0 / tau + D_exc_[i];
        } else {
            A_[i] = inf;
            D_[i] = inf;
        }
    }
    std::vector<double> x(n), ya(n), yb(n), yc(n), yd(n), ye(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        x[i] = grid_.tau[j];
        ya[i] = A_exc_[j];
        yb[i] = B_exc_[j];
        yc[i] = C_[j];
        yd[i] = D_exc_[j];
        ye[i] = E_[j];
    }
    interp_A_exc_ = MonotoneCubic(x, ya);
    interp_B_exc_ = MonotoneCubic(x, yb);
    interp_C_ = MonotoneCubic(x, yc);
    interp_D_exc_ = MonotoneCubic(x, yd);
    interp_E_ = MonotoneCubic(std::move(x), ye);
}

RiccatiPoint RiccatiSolution::at_tau(double tau) const {
    if (!(tau > 0.0) || tau > grid_.tau.front()) {
        throw Error(ErrorCode::OutOfRange, "Riccati query needs 0 < T - t <= T - t0");
    }
    const double eta = model_.eta;
    RiccatiPoint p{};
    p.A = eta / tau + interp_A_exc_(tau);
    p.B = 1.0 + interp_B_exc_(tau);
    p.C = interp_C_(tau);
    p.D = 1.0 / tau + interp_D_exc_(tau);
    p.E = interp_E_(tau);
    return p;
}

RiccatiPoint RiccatiSolution::at(double t) const {
    if (!(t >= grid_.t0) || !(t < grid_.T)) {
        throw Error(ErrorCode::OutOfRange, "Riccati query needs t0 <= t < T");
    }
    return at_tau(grid_.T - t);
}

double RiccatiSolution::D_excess_at_tau(double tau) const {
    return interp_D_exc_(std::clamp(tau, 0.0, grid_.tau.front()));
}

RiccatiSolution solve_riccati(const ModelParams& raw, const SolverConfig& config) {
    const ModelParams model = validate_params(raw);
    const double T = model.horizon_T;
    if (!(config.t0 >= 0.0 && config.t0 < T)) {
        throw Error(ErrorCode::BadInstance, "solver start t0 must lie in [0, T)");
    }
    const ContractionConstants consts = contraction_constants(model);
    double delta = consts.delta;
    if (config.delta_override && *config.delta_override > 0.0) {
        delta = std::min(delta, *config.delta_override);
    }
    delta = std::min(delta, T - config.t0);
    // Keep the terminal window free of coefficient breakpoints.
    std::vector<double> breakpoints = model.rho.interior_breakpoints();
    for (double b : model.lambda.interior_breakpoints()) breakpoints.push_back(b);
    for (double b : breakpoints) {
        if (b < T) delta = std::min(delta, T - b);
    }

    int halvings = 0;
    for (;;) {
        const TimeGrid grid = make_solver_grid(config.t0, T, delta, config.n_regular,
                                               config.n_singular, config.ratio, breakpoints);
        NearTerminalSolution near;
        try {
            near = solve_near_terminal(model, consts, grid, config.picard_tol,
                                       config.picard_max_iter);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoContraction || halvings >= config.max_halvings) {
                throw;
            }
            delta *= 0.5;
            ++halvings;
            continue;
        }

        const std::size_t n = grid.size();
        const std::size_t w = grid.window_begin;
        std::vector<double> A_exc(n), B_exc(n), C(n);
        for (std::size_t k = 0; k < near.tau.size(); ++k) {
            const double tau = near.tau[k];
            const auto& s = near.state[k];
            A_exc[w + k] = s.h_hat;
            B_exc[w + k] = tau * s.g_hat;
            C[w + k] = tau * tau * s.p_hat;
        }
        const auto ext = extend_backward(model, {A_exc[w], B_exc[w], C[w]}, grid,
                                         config.rk_step_fraction);
        for (std::size_t i = 0; i < w; ++i) {
            A_exc[i] = ext[i][0];
            B_exc[i] = ext[i][1];
            C[i] = ext[i][2];
        }

        RiccatiSolution sol(model, grid, std::move(A_exc), std::move(B_exc), std::move(C));
        sol.constants = consts;
        sol.constants.delta = delta;
        sol.picard_iterations = near.iterations;
        sol.contraction_ratios = std::move(near.increment_ratios);
        sol.delta_halvings = halvings;
        return sol;
    }
}

}  // namespace liqsched
