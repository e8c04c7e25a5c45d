#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "liqsched/riccati.hpp"

namespace liqsched {

namespace {

// (1/tau) * (x / expm1(x) - 1), the lower D envelope minus 1/tau.
double d_lower_excess(double eta, double gamma, double tau) {
    const double x = gamma * tau / eta;
    if (x < 1e-4) {
        const double x2 = x * x;
        return (-x / 2.0 + x2 / 12.0 - x2 * x2 / 720.0) / tau;
    }
    return (x / std::expm1(x) - 1.0) / tau;
}

// (1/tau) * (y coth y - 1), the upper D envelope minus 1/tau.
double d_upper_excess(double k, double tau) {
    const double y = k * tau;
    if (y < 1e-3) {
        const double y2 = y * y;
        return (y2 / 3.0 - y2 * y2 / 45.0 + 2.0 * y2 * y2 * y2 / 945.0) / tau;
    }
    return (y / std::tanh(y) - 1.0) / tau;
}

struct Tracker {
    CheckRecord rec;
    bool seen = false;

    explicit Tracker(std::string name) { rec.name = std::move(name); }

    void update(double margin, double t, double tau, double value) {
        if (!seen || margin < rec.worst_margin || std::isnan(margin)) {
            rec.worst_margin = std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin;
            rec.location_t = t;
            rec.location_tau = tau;
            rec.value = value;
            seen = true;
        }
    }

    CheckRecord finish(double tol) {
        rec.pass = rec.worst_margin >= -tol;
        return rec;
    }
};

double rel(double diff, double scale) { return diff / std::max(1.0, std::abs(scale)); }

}  // namespace

double d_lower_bound(const ModelParams& m, double tau) {
    return 1.0 / tau + d_lower_excess(m.eta, m.gamma, tau);
}

double d_upper_bound(const ModelParams& m, double tau) {
    return 1.0 / tau + d_upper_excess(kappa(m), tau);
}

double b_lower_bound(const ModelParams& m, double tau) {
    return std::exp(-m.rho.sup() * tau);
}

double e_upper_bound(const ModelParams& m, double tau) {
    if (m.gamma == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double k = kappa(m);
    return k * std::tanh(k * tau) / m.gamma;
}

bool ValidationReport::all_pass() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

const CheckRecord* ValidationReport::find(const std::string& name) const noexcept {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

ValidationReport check_a_priori_bounds(const RiccatiSolution& sol, double tol) {
    const ModelParams& m = sol.model();
    const TimeGrid& g = sol.grid();
    const double eta = m.eta;
    const double gamma = m.gamma;
    const double k = kappa(m);

    Tracker d_lo("D_lower"), d_hi("D_upper"), b_lo("B_lower"), b_hi("B_upper");
    Tracker e_lo("E_lower"), e_hi("E_upper");
    Tracker a_nn("A_nonneg"), d_nn("D_nonneg");
    Tracker gc_lo("gammaC_range_low"), gc_hi("gammaC_range_high");
    Tracker ee_lo("etaE_range_low"), ee_hi("etaE_range_high");

    const auto& Dx = sol.D_excess();
    const auto& Ax = sol.A_excess();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double tau = g.tau[i];
        if (!(tau > 0.0)) continue;
        const double t = g.t[i];
        const double D = sol.D()[i];
        const double B = sol.B()[i];
        const double C = sol.C()[i];
        const double E = sol.E()[i];

        const double lo_ex = gamma > 0.0 ? d_lower_excess(eta, gamma, tau) : 0.0;
        const double hi_ex = k > 0.0 ? d_upper_excess(k, tau) : 0.0;
        d_lo.update(rel(Dx[i] - lo_ex, 1.0 / tau + lo_ex), t, tau, D);
        d_hi.update(rel(hi_ex - Dx[i], 1.0 / tau + hi_ex), t, tau, D);

        b_lo.update(B - b_lower_bound(m, tau), t, tau, B);
        b_hi.update(-sol.B_excess()[i], t, tau, B);

        e_lo.update(rel(E, 0.0), t, tau, E);
        if (gamma > 0.0) {
            const double eb = e_upper_bound(m, tau);
            e_hi.update(rel(eb - E, eb), t, tau, E);
        }

        const double A = eta / tau + Ax[i];
        a_nn.update(A >= 0.0 ? 0.0 : rel(A, 0.0), t, tau, A);
        d_nn.update(D >= 0.0 ? 0.0 : rel(D, 0.0), t, tau, D);

        gc_lo.update(-gamma * C, t, tau, -gamma * C);
        gc_hi.update(1.0 + gamma * C, t, tau, -gamma * C);
        ee_lo.update(eta * E, t, tau, eta * E);
        ee_hi.update(1.0 - eta * E, t, tau, eta * E);
    }

    ValidationReport rep;
    rep.tolerance = tol;
    for (Tracker* tr : {&d_lo, &d_hi, &b_lo, &b_hi, &e_lo, &a_nn, &d_nn, &gc_lo, &gc_hi, &ee_lo,
                        &ee_hi}) {
        rep.checks.push_back(tr->finish(tol));
    }
    if (gamma > 0.0) {
        rep.checks.push_back(e_hi.finish(tol));
    }
    return rep;
}

ValidationReport check_asymptotics(const RiccatiSolution& sol, int bands) {
    const TimeGrid& g = sol.grid();
    const double delta = g.sing_window;

    // Sup of each scaled quantity per dyadic band (delta 2^-(k+1), delta 2^-k].
    struct BandSup {
        double q[3] = {0.0, 0.0, 0.0};
        double tau = 0.0;
    };
    std::map<int, BandSup> sups;
    for (std::size_t i = g.window_begin; i < g.size(); ++i) {
        const double tau = g.tau[i];
        if (!(tau > 0.0)) continue;
        const int k = static_cast<int>(std::floor(std::log2(delta / tau) + 1e-9));
        auto& b = sups[k];
        b.tau = std::max(b.tau, tau);
        const double q[3] = {std::abs(sol.A_excess()[i]), std::abs(sol.B_excess()[i]) / tau,
                             std::abs(sol.C()[i]) / (tau * tau * tau)};
        for (int c = 0; c < 3; ++c) {
            b.q[c] = std::isfinite(q[c]) ? std::max(b.q[c], q[c])
                                         : std::numeric_limits<double>::infinity();
        }
    }

    std::vector<BandSup> ordered;
    for (const auto& kv : sups) ordered.push_back(kv.second);
    if (bands > 0 && ordered.size() > static_cast<std::size_t>(bands)) {
        ordered.erase(ordered.begin(), ordered.end() - bands);
    }

    static const char* names[3] = {"A_minus_eta_over_tau", "B_minus_1_over_tau",
                                   "C_over_tau_cubed"};
    ValidationReport rep;
    rep.tolerance = 1.5;
    for (int c = 0; c < 3; ++c) {
        CheckRecord rec;
        rec.name = names[c];
        double global = 0.0;
        bool finite = true;
        for (const auto& b : ordered) {
            finite = finite && std::isfinite(b.q[c]);
            global = std::max(global, b.q[c]);
        }
        const double floor = 1e-9 * std::max(1.0, global);
        double worst = 0.0;
        for (std::size_t j = 1; j < ordered.size(); ++j) {
            const double prev = ordered[j - 1].q[c];
            const double cur = ordered[j].q[c];
            const double ratio = cur <= floor ? 0.0 : cur / std::max(prev, floor);
            if (ratio > worst) {
                worst = ratio;
                rec.location_tau = ordered[j].tau;
                rec.location_t = g.T - ordered[j].tau;
            }
        }
        rec.value = finite ? global : std::numeric_limits<double>::infinity();
        rec.worst_margin = finite ? 1.5 - worst : -std::numeric_limits<double>::infinity();
        rec.pass = finite && worst <= 1.5;
        rep.checks.push_back(rec);
    }
    return rep;
}

}  // namespace liqsched
