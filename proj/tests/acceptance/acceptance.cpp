// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "liqsched/battery.hpp"
#include "liqsched/benchmarks.hpp"
#include "liqsched/commands.hpp"
#include "liqsched/oracle.hpp"
#include "liqsched/riccati.hpp"
#include "liqsched/strategy.hpp"

using namespace liqsched;

namespace tol {
constexpr double closed_form_rel = 1e-6;
constexpr double closed_form_seconds = 1.0;
constexpr double vwap_abs = 1e-6;
constexpr double vwap_seconds = 1.0;
constexpr double decomposition_BC = 1e-8;
constexpr double decomposition_A_rel = 1e-6;
constexpr double bounds_slack = 1e-8;
constexpr double bounds_seconds = 30.0;
constexpr double contraction_ratio = 0.55;
constexpr double oracle_value_rel = 0.01;
constexpr double oracle_schedule_rel = 0.02;
constexpr double oracle_seconds = 60.0;
constexpr double self_consistency_rel = 1e-3;
constexpr double perturbation_slack = 1e-9;
constexpr double liquidation = 1e-6;
constexpr double midpoint_rel = 0.05;
constexpr double family_seconds = 10.0;
}  // namespace tol

constexpr std::uint64_t kBatterySeed = 20261017;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ModelParams constant_model(double eta, double gamma, double T, double rho, double lambda) {
    ModelParams m;
    m.eta = eta;
    m.gamma = gamma;
    m.horizon_T = T;
    m.rho = CoefficientFn::constant(rho);
    m.lambda = CoefficientFn::constant(lambda);
    return m;
}

ProblemInstance instance(const ModelParams& m, double x0, double y0) {
    ProblemInstance p;
    p.model = m;
    p.x0 = x0;
    p.y0 = y0;
    return p;
}

const std::vector<ModelParams>& battery() {
    static const std::vector<ModelParams> models = random_battery(kBatterySeed);
    return models;
}

const std::vector<RiccatiSolution>& battery_solutions() {
    static const std::vector<RiccatiSolution> sols = [] {
        std::vector<RiccatiSolution> out;
        for (const auto& m : battery()) out.push_back(solve_riccati(m));
        return out;
    }();
    return sols;
}

Outcome closed_form() {
    const auto sol = solve_riccati(constant_model(1.0, 0.0, 1.0, 0.0, 4.0));
    double worst = 0.0;
    const auto& g = sol.grid();
    for (std::size_t i = 0; i + 1 < sol.size(); ++i) {
        if (g.tau[i] < 1e-3) break;
        const double exact = 2.0 / std::tanh(2.0 * g.tau[i]);
        worst = std::max(worst, std::abs(sol.A()[i] / exact - 1.0));
    }
    for (int k = 0; k <= 4000; ++k) {
        const double t = (1.0 - 1e-3) * k / 4000.0;
        const double exact = 2.0 / std::tanh(2.0 * (1.0 - t));
        worst = std::max(worst, std::abs(sol.at(t).A / exact - 1.0));
    }
    return {worst <= tol::closed_form_rel, fmt("max rel err %.3e", worst)};
}

Outcome vwap() {
    const double x0 = 2.0, T = 1.5;
    const auto m = constant_model(1.0, 0.0, T, 0.0, 0.0);
    const auto tr = simulate_optimal(solve_riccati(m), instance(m, x0, 0.0));
    double rate_err = 0.0, lin_err = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        lin_err = std::max(lin_err, std::abs(tr.X[i] - x0 * tr.tau[i] / T));
        if (tr.tau[i] > 0.0) rate_err = std::max(rate_err, std::abs(tr.xi[i] - x0 / T));
    }
    const double worst = std::max(rate_err, lin_err);
    return {worst <= tol::vwap_abs, fmt("rate err %.3e", rate_err) + fmt(", X err %.3e", lin_err)};
}

Outcome decomposition() {
    double worst_BC = 0.0, worst_A = 0.0;
    for (double gamma : {0.0, 1.0, 100.0}) {
        const auto m = constant_model(0.2, gamma, 1.0, 0.0, 3.0);
        const auto sol = solve_riccati(m);
        const auto At = scalar_A_tilde(m.eta, m.lambda, 1.0, sol.grid());
        for (std::size_t i = 0; i + 1 < sol.size(); ++i) {
            worst_BC = std::max({worst_BC, std::abs(sol.B()[i] - 1.0), std::abs(sol.C()[i])});
            // compare nonsingular parts to keep relative error meaningful
            const double a = sol.A_excess()[i] - gamma;
            const double ref = At.values[i][1];
            worst_A = std::max(worst_A, std::abs(a - ref) / std::max(1.0, std::abs(At.values[i][0])));
        }
    }
    return {worst_BC <= tol::decomposition_BC && worst_A <= tol::decomposition_A_rel,
            fmt("max |B-1|,|C| %.3e", worst_BC) + fmt(", A-gamma rel err %.3e", worst_A)};
}

Outcome bounds_suite() {
    double worst = INFINITY;
    std::string where;
    bool ok = true;
    const auto& sols = battery_solutions();
    for (std::size_t k = 0; k < sols.size(); ++k) {
        const auto rep = check_a_priori_bounds(sols[k], tol::bounds_slack);
        ok = ok && rep.all_pass();
        for (const auto& c : rep.checks) {
            if (c.worst_margin < worst) {
                worst = c.worst_margin;
                where = "model " + std::to_string(k) + " " + c.name;
            }
        }
    }
    return {ok, std::to_string(sols.size()) + " models, worst margin " + fmt("%.3e", worst) + " (" + where + ")"};
}

Outcome asymptotics_suite() {
    bool ok = true;
    double worst = 0.0;
    for (const auto& sol : battery_solutions()) {
        const auto rep = check_asymptotics(sol);
        ok = ok && rep.all_pass();
        for (const auto& c : rep.checks) worst = std::max(worst, 1.5 - c.worst_margin);
    }
    return {ok, fmt("worst band growth ratio %.3f (limit 1.5)", worst)};
}

Outcome contraction() {
    double worst = 0.0;
    std::size_t count = 0;
    for (const auto& sol : battery_solutions()) {
        for (double r : sol.contraction_ratios) worst = std::max(worst, r);
        count += sol.delta_halvings == 0 ? 1 : 0;
    }
    const bool auto_delta = count == battery_solutions().size();
    return {worst <= tol::contraction_ratio && auto_delta,
            fmt("max increment ratio %.4f", worst) + (auto_delta ? ", no delta halving" : ", delta halved")};
}

Outcome oracle_agreement() {
    const auto m = constant_model(0.05, 100.0, 1.0, 1.0, 0.0);
    const auto p = instance(m, 1.0, 0.0);
    const auto sol = solve_riccati(m);
    const double V = value_function(sol, 0.0, 1.0, 0.0);
    const std::size_t N = 2000;
    const auto ds = solve_kkt(discretize_problem(p, N));
    const double value_rel = std::abs(V - ds.cost) / ds.cost;

    SimulationOptions opt;
    opt.substeps = 8;
    const auto tr = simulate_optimal(sol, p, opt);
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const double a = ds.t[k], b = ds.t[k + 1];
        if (b > 0.95 + 1e-12) break;
        const double cont = (inventory_at(tr, a) - inventory_at(tr, b)) / (b - a);
        diff = std::max(diff, std::abs(ds.xi[k] - cont));
        scale = std::max(scale, std::abs(cont));
    }
    const double sched_rel = diff / scale;
    return {value_rel <= tol::oracle_value_rel && sched_rel <= tol::oracle_schedule_rel,
            fmt("value rel %.3e", value_rel) + fmt(", schedule rel %.3e", sched_rel)};
}

Outcome verification() {
    const auto m = constant_model(0.1, 100.0, 1.0, 1.0, 0.0);
    const auto sol = solve_riccati(m);
    SimulationOptions opt;
    opt.substeps = 8;
    const auto tr = simulate_optimal(sol, instance(m, 1.0, 0.0), opt);
    const double V = value_function(sol, 0.0, 1.0, 0.0);
    const double rel = std::abs(cost_of_trajectory(m, tr).total - V) / V;
    const SineBump bump{0.1, 0.9, 5.0};
    double min_excess = INFINITY;
    for (double eps : {0.1, -0.1, 0.01, -0.01}) {
        const auto pt = perturb_trajectory(
            m, tr, [&](double t) { return bump(t); }, [&](double t) { return bump.integral(t); }, eps);
        min_excess = std::min(min_excess, cost_of_trajectory(m, pt).total - V);
    }
    return {rel <= tol::self_consistency_rel && min_excess >= -tol::perturbation_slack,
            fmt("cost vs value rel %.3e", rel) + fmt(", min perturbed excess %.3e", min_excess)};
}

Outcome liquidation() {
    double worst_x = 0.0, worst_ratio = 0.0;
    bool finite = true;
    const auto& sols = battery_solutions();
    for (std::size_t k = 0; k < sols.size(); ++k) {
        const double x0 = 1.0 + static_cast<double>(k % 5);
        const auto tr = simulate_optimal(sols[k], instance(battery()[k], x0, 0.0));
        const double last = std::abs(tr.X[tr.size() - 2]) / std::max(1.0, x0);
        worst_x = std::max(worst_x, last);
        const double r = max_decay_ratio(tr);
        finite = finite && std::isfinite(r);
        worst_ratio = std::max(worst_ratio, r / x0);
    }
    return {worst_x <= tol::liquidation && finite,
            fmt("max |X(t_last)| %.3e", worst_x) + fmt(", max |X|/(x0 (T-t)) %.3f", worst_ratio)};
}

Outcome eta_family() {
    std::vector<double> ow, ow_open, ac;
    double mid = 0.0;
    for (double eta : {1.0, 0.1, 0.01}) {
        const auto m = constant_model(eta, 100.0, 1.0, 1.0, 0.0);
        const auto tr = simulate_optimal(solve_riccati(m), instance(m, 1.0, 0.0));
        const auto r = compare_paths(m, tr, 1.0, 0.01);
        ow.push_back(r.ow_gap);
        ow_open.push_back(r.ow_gap_open);
        if (eta == 0.01) mid = inventory_at(tr, 0.5);
    }
    for (double eta : {0.01, 0.1, 1.0}) {
        const auto m = constant_model(eta, 100.0, 1.0, 1.0, 0.0);
        const auto tr = simulate_optimal(solve_riccati(m), instance(m, 1.0, 0.0));
        ac.push_back(compare_paths(m, tr, 1.0, 0.01).ac_gap);
    }
    const bool ow_dec = ow[0] > ow[1] && ow[1] > ow[2];
    const bool ac_dec = ac[0] > ac[1] && ac[1] > ac[2];
    const bool mid_ok = std::abs(mid - 0.5) <= tol::midpoint_rel * 0.5;
    std::string d = fmt("OW gap %.4f", ow[0]) + fmt(" > %.4f", ow[1]) + fmt(" > %.4f", ow[2]);
    d += fmt(" (open interval %.4f)", ow_open[2]);
    d += fmt(", X(0.5) %.4f", mid);
    d += fmt(", AC gap %.4f", ac[0]) + fmt(" > %.4f", ac[1]) + fmt(" > %.4f", ac[2]);
    return {ow_dec && ac_dec && mid_ok, d};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double time_limit;  // seconds, <= 0 means none
    };
    const std::vector<Criterion> criteria{
        {1, "closed-form Riccati", closed_form, tol::closed_form_seconds},
        {2, "linear schedule degeneracy", vwap, tol::vwap_seconds},
        {3, "zero-resilience decomposition", decomposition, 0.0},
        {4, "a priori bound suite", bounds_suite, tol::bounds_seconds},
        {5, "asymptotics suite", asymptotics_suite, 0.0},
        {6, "contraction observation", contraction, 0.0},
        {7, "oracle agreement", oracle_agreement, tol::oracle_seconds},
        {8, "verification property", verification, 0.0},
        {9, "liquidation constraint", liquidation, 0.0},
        {10, "impact-factor family", eta_family, tol::family_seconds},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s %2d %-32s %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, in_time ? "" : ", over time limit");
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
