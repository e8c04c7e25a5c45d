#include "liqsched/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace liqsched {

double feedback_rate(const RiccatiSolution& sol, double t, double x, double y) {
    const auto p = sol.at(t);
    return p.D * x - p.E * y;
}

double value_function(const RiccatiSolution& sol, double t, double x, double y) {
    const auto p = sol.at(t);
    return 0.5 * p.A * x * x + p.B * x * y + 0.5 * p.C * y * y;
}

std::array<double, 4> expm2(const std::array<double, 4>& M) {
    // M = s I + N with trace N = 0 and N^2 = q2 I.
    const double s = 0.5 * (M[0] + M[3]);
    const double n00 = M[0] - s;
    const double n11 = M[3] - s;
    const double q2 = n00 * n00 + M[1] * M[2];
    double c = 0.0;   // e^s cosh q
    double sq = 0.0;  // e^s sinh(q) / q
    if (std::abs(q2) < 1e-8) {
        const double es = std::exp(s);
        c = es * (1.0 + q2 / 2.0 + q2 * q2 / 24.0);
        sq = es * (1.0 + q2 / 6.0 + q2 * q2 / 120.0);
    } else if (q2 > 0.0) {
        const double q = std::sqrt(q2);
        const double ep = std::exp(s + q);
        const double em = std::exp(s - q);
        c = 0.5 * (ep + em);
        sq = 0.5 * (ep - em) / q;
    } else {
        const double w = std::sqrt(-q2);
        const double es = std::exp(s);
        c = es * std::cos(w);
        sq = es * std::sin(w) / w;
    }
    return {c + sq * n00, sq * M[1], sq * M[2], c + sq * n11};
}

namespace {

// Node set for the path: instance t0 followed by solver nodes beyond it,
// each interval split into `sub` pieces (uniform in tau).
std::vector<double> path_taus(const TimeGrid& g, double tau0, std::size_t sub) {
    std::vector<double> base{tau0};
    for (double tau : g.tau) {
        if (tau < tau0 * (1.0 - 1e-14)) base.push_back(tau);
    }
    if (sub <= 1) return base;
    std::vector<double> out;
    out.reserve((base.size() - 1) * sub + 1);
    for (std::size_t i = 0; i + 1 < base.size(); ++i) {
        const double a = base[i];
        const double b = base[i + 1];
        // The last interval ends at T; keep it whole.
        const std::size_t k = b > 0.0 ? sub : 1;
        for (std::size_t j = 0; j < k; ++j) {
            out.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(k));
        }
    }
    out.push_back(base.back());
    return out;
}

}  // namespace

Trajectory simulate_optimal(const RiccatiSolution& sol, const ProblemInstance& instance,
                            const SimulationOptions& options) {
    validate_instance(instance);
    const ModelParams& m = sol.model();
    const TimeGrid& g = sol.grid();
    const double T = g.T;
    if (instance.t0 < g.t0 - 1e-12 * std::max(1.0, T)) {
        throw Error(ErrorCode::OutOfRange, "instance starts before the solved grid");
    }
    const double gamma = m.gamma;
    const double tau0 = std::min(T - instance.t0, g.tau.front());
    const auto taus = path_taus(g, tau0, std::max<std::size_t>(1, options.substeps));
    const std::size_t n = taus.size();

    Trajectory tr;
    tr.tau = taus;
    tr.t.resize(n);
    tr.X.assign(n, 0.0);
    tr.Y.assign(n, 0.0);
    tr.xi.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) tr.t[i] = T - taus[i];
    tr.t.front() = instance.t0;

    std::vector<RiccatiPoint> pts(n - 1);
    std::vector<double> dexc(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        pts[i] = sol.at_tau(taus[i]);
        dexc[i] = sol.D_excess_at_tau(taus[i]);
    }

    double X = instance.x0;
    double Y = instance.y0;
    tr.X[0] = X;
    tr.Y[0] = Y;
    for (std::size_t i = 0; i + 2 < n; ++i) {
        tr.xi[i] = pts[i].D * X - pts[i].E * Y;
        const double ta = taus[i];
        const double tb = taus[i + 1];
        const double h = ta - tb;
        const double t_mid = T - 0.5 * (ta + tb);
        const double rho = m.rho.in_piece(m.rho.piece_at(t_mid), t_mid);
        const double intD = std::log(ta / tb) + 0.5 * h * (dexc[i] + dexc[i + 1]);
        const double intE = 0.5 * h * (pts[i].E + pts[i + 1].E);
        // h * [[-d, e], [gamma d, -(rho + gamma e)]] with step averages d, e.
        const auto P = expm2({-intD, intE, gamma * intD, -(rho * h + gamma * intE)});
        const double Xn = P[0] * X + P[1] * Y;
        const double Yn = P[2] * X + P[3] * Y;
        X = Xn;
        Y = Yn;
        tr.X[i + 1] = X;
        tr.Y[i + 1] = Y;
    }
    const std::size_t last = n - 2;
    tr.xi[last] = pts[last].D * X - pts[last].E * Y;
    if (!(std::abs(X) <= options.terminal_tol * std::max(1.0, std::abs(instance.x0)))) {
        std::ostringstream os;
        os << "|X| = " << std::abs(X) << " at T - t = " << taus[last];
        throw Error(ErrorCode::TerminalMiss, os.str());
    }
    // Tail [T - tau_last, T]: the remaining inventory is sold into the book.
    tr.X[n - 1] = 0.0;
    tr.Y[n - 1] = Y + gamma * X;
    tr.xi[n - 1] = tr.xi[last];
    tr.realized_cost = cost_of_trajectory(m, tr).total;
    return tr;
}

CostBreakdown cost_of_trajectory(const ModelParams& m, const Trajectory& tr) {
    CostBreakdown c;
    const std::size_t n = tr.size();
    if (n < 2) return c;
    const bool have_tau = tr.tau.size() == n;
    auto lam = [&](std::size_t i, std::size_t piece_from) {
        // Evaluate lambda inside the step's piece.
        const double tm = 0.5 * (tr.t[piece_from] + tr.t[piece_from + 1]);
        return m.lambda.in_piece(m.lambda.piece_at(tm), tr.t[i]);
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = have_tau ? tr.tau[i] - tr.tau[i + 1] : tr.t[i + 1] - tr.t[i];
        c.instantaneous += 0.25 * m.eta * h * (tr.xi[i] * tr.xi[i] + tr.xi[i + 1] * tr.xi[i + 1]);
        c.persistent += 0.5 * h * (tr.xi[i] * tr.Y[i] + tr.xi[i + 1] * tr.Y[i + 1]);
        c.risk += 0.25 * h * (lam(i, i) * tr.X[i] * tr.X[i] + lam(i + 1, i) * tr.X[i + 1] * tr.X[i + 1]);
    }
    c.total = c.instantaneous + c.persistent + c.risk;
    return c;
}

double max_decay_ratio(const Trajectory& tr) {
    double r = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr.tau[i] > 0.0) r = std::max(r, std::abs(tr.X[i]) / tr.tau[i]);
    }
    return r;
}

double min_rate(const Trajectory& tr) {
    return tr.xi.empty() ? 0.0 : *std::min_element(tr.xi.begin(), tr.xi.end());
}

double inventory_at(const Trajectory& tr, double t) {
    const double T = tr.t.back();
    const double tau = T - t;
    if (tr.size() < 2 || tau > tr.tau.front() || tau < 0.0) {
        throw Error(ErrorCode::OutOfRange, "inventory query outside the trajectory");
    }
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        if (tau <= tr.tau[i] && tau >= tr.tau[i + 1]) {
            const double w = (tr.tau[i] - tau) / (tr.tau[i] - tr.tau[i + 1]);
            return (1.0 - w) * tr.X[i] + w * tr.X[i + 1];
        }
    }
    return tr.X.back();
}

double SineBump::operator()(double t) const {
    if (t <= a || t >= b) return 0.0;
    return amp * std::sin(2.0 * std::numbers::pi * (t - a) / (b - a));
}

double SineBump::integral(double t) const {
    if (t <= a || t >= b) return 0.0;
    const double w = 2.0 * std::numbers::pi / (b - a);
    return amp * (1.0 - std::cos(w * (t - a))) / w;
}

Trajectory perturb_trajectory(const ModelParams& m, const Trajectory& base,
                              const std::function<double(double)>& phi,
                              const std::function<double(double)>& Phi, double eps) {
    Trajectory tr = base;
    const std::size_t n = tr.size();
    // Z' = -rho Z + gamma phi, Z(t0) = 0, by RK4 substeps per interval.
    double Z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double ta = tr.t[i - 1];
            const double h_total = tr.tau[i - 1] - tr.tau[i];
            const double t_mid = ta + 0.5 * h_total;
            const std::size_t piece = m.rho.piece_at(t_mid);
            auto field = [&](double t, const std::array<double, 1>& z) {
                return std::array<double, 1>{-m.rho.in_piece(piece, t) * z[0] + m.gamma * phi(t)};
            };
            const auto k = static_cast<std::size_t>(std::ceil(h_total / 1e-3));
            const double h = h_total / static_cast<double>(std::max<std::size_t>(1, k));
            std::array<double, 1> z{Z};
            for (std::size_t j = 0; j < std::max<std::size_t>(1, k); ++j) {
                z = rk4_step<1>(field, ta + h * static_cast<double>(j), z, h);
            }
            Z = z[0];
        }
        const double t = tr.t[i];
        tr.xi[i] += eps * phi(t);
        tr.X[i] -= eps * Phi(t);
        tr.Y[i] += eps * Z;
    }
    tr.realized_cost = cost_of_trajectory(m, tr).total;
    return tr;
}

}  // namespace liqsched
