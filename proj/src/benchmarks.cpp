#include "liqsched/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liqsched {

double OWSchedule::inventory(double t) const { return x0 - initial_block - rate * t; }

Trajectory almgren_chriss_trajectory(double eta, double lambda_const, double T, double x0,
                                     const TimeGrid& grid) {
    if (!(eta > 0.0)) throw Error(ErrorCode::NonpositiveEta, "eta must be > 0");
    if (!(lambda_const >= 0.0)) throw Error(ErrorCode::NegativeCoefficient, "lambda must be >= 0");
    const double k = std::sqrt(lambda_const / eta);
    const double H = T - grid.t0;
    Trajectory tr;
    tr.t = grid.t;
    tr.tau = grid.tau;
    const std::size_t n = grid.size();
    tr.X.resize(n);
    tr.xi.resize(n);
    tr.Y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = grid.tau[i];
        if (k * H < 1e-8) {
            tr.X[i] = x0 * tau / H;
            tr.xi[i] = x0 / H;
        } else {
            tr.X[i] = x0 * std::sinh(k * tau) / std::sinh(k * H);
            tr.xi[i] = x0 * k * std::cosh(k * tau) / std::sinh(k * H);
        }
    }
    return tr;
}

OWSchedule obizhaeva_wang_schedule(double rho_const, double T, double x0) {
    if (!(rho_const >= 0.0)) throw Error(ErrorCode::NegativeCoefficient, "rho must be >= 0");
    if (!(T > 0.0)) throw Error(ErrorCode::NonpositiveHorizon, "T must be > 0");
    OWSchedule s;
    s.x0 = x0;
    s.T = T;
    const double denom = rho_const * T + 2.0;
    s.initial_block = x0 / denom;
    s.terminal_block = x0 / denom;
    s.rate = rho_const * x0 / denom;
    return s;
}

namespace {

// Excess a = A~ - eta/tau solves da/dtau = lambda - 2a/tau - a^2/eta with
// a ~ lambda(T-) tau / 3 as tau -> 0. Integrated upward through `taus`
// (ascending, positive), returning a at each entry.
std::vector<double> scalar_excess(double eta, const CoefficientFn& lambda, double T,
                                  const std::vector<double>& taus) {
    const double lam_T = lambda.in_piece(lambda.piece_at(T - 1e-12 * T), T);
    const double k = std::sqrt(2.0 * lambda.sup() / eta);
    const double tau_s = std::min(1e-6 * T, k > 0.0 ? 1e-4 / k : 1e-6 * T);

    std::vector<double> stops;
    for (double b : lambda.interior_breakpoints()) stops.push_back(T - b);
    std::vector<double> out(taus.size());
    double tau = tau_s;
    std::array<double, 1> a{lam_T * tau_s / 3.0};
    auto advance = [&](double to) {
        while (tau < to) {
            double seg_end = to;
            for (double s : stops) {
                if (s > tau && s < seg_end) seg_end = s;
            }
            const double t_mid = T - 0.5 * (tau + seg_end);
            const std::size_t piece = lambda.piece_at(t_mid);
            auto field = [&](double s, const std::array<double, 1>& y) {
                const double l = lambda.in_piece(piece, T - s);
                return std::array<double, 1>{l - 2.0 * y[0] / s - y[0] * y[0] / eta};
            };
            while (tau < seg_end) {
                const double D = 1.0 / tau + a[0] / eta;
                const double h = std::min({seg_end - tau, 0.01 * tau, 0.01 / std::abs(D)});
                a = rk4_step<1>(field, tau, a, h);
                tau = (seg_end - tau - h) <= 0.0 ? seg_end : tau + h;
            }
        }
    };
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] <= tau_s) {
            out[i] = lam_T * taus[i] / 3.0;
        } else {
            advance(taus[i]);
            out[i] = a[0];
        }
    }
    return out;
}

}  // namespace

SampledFunction scalar_A_tilde(double eta, const CoefficientFn& lambda, double T,
                               const TimeGrid& grid) {
    if (!(eta > 0.0)) throw Error(ErrorCode::NonpositiveEta, "eta must be > 0");
    SampledFunction f;
    f.grid = grid;
    const std::size_t n = grid.size();
    f.values.assign(n, {0.0, 0.0});
    const double inf = std::numeric_limits<double>::infinity();
    if (lambda.is_constant()) {
        const double l = lambda.values().front();
        const double k = std::sqrt(l / eta);
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = grid.tau[i];
            if (tau <= 0.0) {
                f.values[i] = {inf, 0.0};
                continue;
            }
            const double y = k * tau;
            // sqrt(eta lambda) coth(k tau) - eta/tau = (eta/tau)(y coth y - 1)
            double ex = 0.0;
            if (y < 1e-3) {
                const double y2 = y * y;
                ex = (y2 / 3.0 - y2 * y2 / 45.0 + 2.0 * y2 * y2 * y2 / 945.0);
            } else {
                ex = y / std::tanh(y) - 1.0;
            }
            ex *= eta / tau;
            f.values[i] = {eta / tau + ex, ex};
        }
        return f;
    }
    std::vector<double> asc;
    for (std::size_t i = n; i-- > 0;) {
        if (grid.tau[i] > 0.0) asc.push_back(grid.tau[i]);
    }
    const auto ex = scalar_excess(eta, lambda, T, asc);
    std::size_t j = 0;
    for (std::size_t i = n; i-- > 0;) {
        const double tau = grid.tau[i];
        if (tau <= 0.0) {
            f.values[i] = {inf, 0.0};
        } else {
            f.values[i] = {eta / tau + ex[j], ex[j]};
            ++j;
        }
    }
    return f;
}

Trajectory almgren_chriss_reference(double eta, const CoefficientFn& lambda, double T, double x0,
                                    const TimeGrid& grid) {
    if (lambda.is_constant()) {
        return almgren_chriss_trajectory(eta, lambda.values().front(), T, x0, grid);
    }
    const auto a = scalar_A_tilde(eta, lambda, T, grid);
    Trajectory tr;
    tr.t = grid.t;
    tr.tau = grid.tau;
    const std::size_t n = grid.size();
    tr.X.assign(n, 0.0);
    tr.Y.assign(n, 0.0);
    tr.xi.assign(n, 0.0);
    double X = x0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            if (grid.tau[i] <= 0.0) {
                X = 0.0;
            } else {
                const double h = grid.tau[i - 1] - grid.tau[i];
                const double intD = std::log(grid.tau[i - 1] / grid.tau[i])
                                    + 0.5 * h * (a.values[i - 1][1] + a.values[i][1]) / eta;
                X *= std::exp(-intD);
            }
        }
        tr.X[i] = X;
        tr.xi[i] = grid.tau[i] > 0.0 ? a.values[i][0] / eta * X : tr.xi[i - 1];
    }
    return tr;
}

double scalar_A_tilde_at(double eta, const CoefficientFn& lambda, double T, double tau) {
    if (!(tau > 0.0)) throw Error(ErrorCode::OutOfRange, "A~ needs tau > 0");
    TimeGrid g;
    g.t0 = T - tau;
    g.T = T;
    g.t = {T - tau};
    g.tau = {tau};
    return scalar_A_tilde(eta, lambda, T, g).values.front().front();
}

double rho_zero_value(double eta, double gamma, const CoefficientFn& lambda, double T, double t,
                      double x, double y) {
    const double a = scalar_A_tilde_at(eta, lambda, T, T - t);
    return 0.5 * (a + gamma) * x * x + x * y;
}

}  // namespace liqsched
