#include "liqsched/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "liqsched/benchmarks.hpp"
#include "liqsched/io.hpp"
#include "liqsched/oracle.hpp"

namespace liqsched {

namespace {

using ojson = nlohmann::ordered_json;

ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

void write_json(const RunConfig& cfg, const char* name, const ojson& j) {
    write_text(cfg.output_dir / name, j.dump(2) + "\n");
}

int fail(const RunConfig& cfg, const char* report, const Error& e, std::ostream& log) {
    ojson j;
    j["status"] = "error";
    j["error"] = e.name();
    j["message"] = e.what();
    write_json(cfg, report, j);
    log << "error: " << e.what() << '\n';
    return kExitFailure;
}

ojson check_json(const CheckRecord& c, const std::string& prefix) {
    ojson j;
    j["name"] = prefix + c.name;
    j["pass"] = c.pass;
    j["worst_margin"] = num(c.worst_margin);
    j["location_t"] = num(c.location_t);
    j["location_tau"] = num(c.location_tau);
    j["value"] = num(c.value);
    return j;
}

CheckRecord make_check(std::string name, double margin, double value, double tol = 0.0) {
    CheckRecord c;
    c.name = std::move(name);
    c.worst_margin = std::isnan(margin) ? -INFINITY : margin;
    c.value = value;
    c.pass = c.worst_margin >= -tol;
    return c;
}

// Largest violation of the algebraic identities relating D, E to A, B, C.
double closure_residual(const ModelParams& m, const std::vector<double>& tau,
                        const std::vector<double>& A, const std::vector<double>& B,
                        const std::vector<double>& C, const std::vector<double>& D,
                        const std::vector<double>& E) {
    double worst = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!(tau[i] > 0.0)) continue;
        const double r1 = std::abs(m.eta * D[i] + m.gamma * B[i] - A[i]) / std::max(1.0, std::abs(A[i]));
        const double r2 = std::abs(m.eta * E[i] - m.gamma * C[i] + B[i] - 1.0);
        worst = std::max({worst, std::isnan(r1) ? INFINITY : r1, std::isnan(r2) ? INFINITY : r2});
    }
    return worst;
}

double max_ratio(const std::vector<double>& r) {
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

// Bounds, asymptotics, closure, contraction and liquidation for one model.
void model_checks(const ModelParams& model, const RunConfig& cfg, const std::string& prefix,
                  ojson& checks, bool& all_pass, bool with_costs) {
    SolverConfig sc = cfg.solver;
    sc.t0 = 0.0;
    const RiccatiSolution sol = solve_riccati(model, sc);
    auto push = [&](const CheckRecord& c, const std::string& p) {
        checks.push_back(check_json(c, prefix + p));
        all_pass = all_pass && c.pass;
    };
    for (const auto& c : check_a_priori_bounds(sol, cfg.validate_tol).checks) push(c, "bounds/");
    for (const auto& c : check_asymptotics(sol).checks) push(c, "asymptotics/");
    const double closure = closure_residual(model, sol.grid().tau, sol.A(), sol.B(), sol.C(),
                                            sol.D(), sol.E());
    push(make_check("closure", 1e-10 - closure, closure), "");
    const double ratio = max_ratio(sol.contraction_ratios);
    push(make_check("contraction", 0.55 - ratio, ratio), "");

    ProblemInstance inst{model, 0.0, cfg.instance.x0, cfg.instance.y0};
    SimulationOptions opt = cfg.simulation;
    opt.terminal_tol = INFINITY;
    const Trajectory tr = simulate_optimal(sol, inst, opt);
    const std::size_t last = tr.size() - 2;
    const double miss = std::abs(tr.X[last]) / std::max(1.0, std::abs(inst.x0));
    push(make_check("liquidation", 1e-6 - miss, miss), "");
    const double decay = max_decay_ratio(tr);
    push(make_check("decay_ratio_finite", std::isfinite(decay) ? 0.0 : -INFINITY, decay), "");
    if (!with_costs) return;

    const double V = value_function(sol, 0.0, inst.x0, inst.y0);
    const double self = std::abs(tr.realized_cost - V) / std::max(1e-300, std::abs(V));
    push(make_check("self_consistency", 1e-3 - self, self), "");
    if (cfg.oracle_N > 0) {
        const double o = oracle_value(inst, cfg.oracle_N);
        const double slack = 0.005 * std::abs(o);
        push(make_check("oracle_dominance", (o + slack - V) / std::max(1.0, std::abs(o)), o), "");
    }
}

ModelParams cell_model(const ModelParams& base, double eta, double gamma,
                       const std::optional<double>& rho, const std::optional<double>& lambda) {
    ModelParams m = base;
    m.eta = eta;
    m.gamma = gamma;
    if (rho) m.rho = CoefficientFn::constant(*rho);
    if (lambda) m.lambda = CoefficientFn::constant(*lambda);
    return m;
}

std::string coeff_label(const CoefficientFn& f) {
    return f.kind() == CoefficientFn::Kind::Constant ? format_double(f.values().front())
                                                     : std::string("piecewise");
}

}  // namespace

CompareResult compare_paths(const ModelParams& model, const Trajectory& tr, double x0,
                            double trim) {
    CompareResult r;
    const double T = model.horizon_T;
    const double t0 = tr.t.front();
    const double H = T - t0;
    TimeGrid g;
    g.t0 = t0;
    g.T = T;
    g.t = tr.t;
    g.tau = tr.tau;
    const Trajectory ac = almgren_chriss_reference(model.eta, model.lambda, T, x0, g);
    r.ow_rho = model.rho.integral(t0, T) / H;
    const OWSchedule ow = obizhaeva_wang_schedule(r.ow_rho, H, x0);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        r.ac_gap = std::max(r.ac_gap, std::abs(tr.X[i] - ac.X[i]));
        const double s = H - tr.tau[i];  // elapsed time
        if (!(s > 0.0) || !(tr.tau[i] > 0.0)) continue;
        const double gap = std::abs(tr.X[i] - ow.inventory(s));
        r.ow_gap_open = std::max(r.ow_gap_open, gap);
        if (s >= trim * H && tr.tau[i] >= trim * H) r.ow_gap = std::max(r.ow_gap, gap);
    }
    return r;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    try {
        const RiccatiSolution sol = solve_riccati(cfg.model, cfg.solver);
        write_riccati_csv(cfg.output_dir / "riccati.csv", sol);
        ojson j;
        j["status"] = "ok";
        j["delta"] = sol.delta();
        j["delta_halvings"] = sol.delta_halvings;
        j["ball_radius"] = sol.constants.R;
        j["lipschitz_bound"] = sol.constants.L;
        j["picard_iterations"] = sol.picard_iterations;
        j["contraction_ratios"] = ojson::array();
        for (double r : sol.contraction_ratios) j["contraction_ratios"].push_back(num(r));
        j["nodes"] = sol.size();
        j["closure_residual"] = closure_residual(sol.model(), sol.grid().tau, sol.A(), sol.B(),
                                                 sol.C(), sol.D(), sol.E());
        j["A_t0"] = sol.A().front();
        j["B_t0"] = sol.B().front();
        j["C_t0"] = sol.C().front();
        write_json(cfg, "solve_report.json", j);
        log << "solved: delta = " << sol.delta() << ", " << sol.picard_iterations
            << " Picard iterations, " << sol.size() << " nodes\n";
        return kExitOk;
    } catch (const Error& e) {
        return fail(cfg, "solve_report.json", e, log);
    }
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    try {
        const RiccatiSolution sol = solve_riccati(cfg.model, cfg.solver);
        ProblemInstance inst = cfg.instance;
        inst.model = cfg.model;
        const Trajectory tr = simulate_optimal(sol, inst, cfg.simulation);
        write_trajectory_csv(cfg.output_dir / "trajectory.csv", tr);
        const CostBreakdown c = cost_of_trajectory(cfg.model, tr);
        const double V = value_function(sol, inst.t0, inst.x0, inst.y0);
        ojson j;
        j["status"] = "ok";
        j["instantaneous"] = c.instantaneous;
        j["persistent"] = c.persistent;
        j["risk"] = c.risk;
        j["total"] = c.total;
        j["value_function"] = V;
        j["relative_gap"] = std::abs(c.total - V) / std::max(1e-300, std::abs(V));
        j["min_rate"] = min_rate(tr);
        j["max_decay_ratio"] = num(max_decay_ratio(tr));
        j["X_last_before_T"] = tr.X[tr.size() - 2];
        write_json(cfg, "cost.json", j);
        log << "simulated: cost " << c.total << ", value " << V << '\n';
        return kExitOk;
    } catch (const Error& e) {
        return fail(cfg, "cost.json", e, log);
    }
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
    try {
        const RiccatiSolution sol = solve_riccati(cfg.model, cfg.solver);
        ProblemInstance inst = cfg.instance;
        inst.model = cfg.model;
        const Trajectory tr = simulate_optimal(sol, inst, cfg.simulation);
        const CompareResult r = compare_paths(cfg.model, tr, inst.x0, cfg.ow_trim);

        TimeGrid g;
        g.t0 = tr.t.front();
        g.T = cfg.model.horizon_T;
        g.t = tr.t;
        g.tau = tr.tau;
        const Trajectory ac = almgren_chriss_reference(cfg.model.eta, cfg.model.lambda, g.T, inst.x0, g);
        const double H = g.T - g.t0;
        const OWSchedule ow = obizhaeva_wang_schedule(r.ow_rho, H, inst.x0);
        std::ostringstream os;
        os << "t,X_model,X_AC,X_OW\n";
        double last_t = -INFINITY;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const bool terminal = tr.tau[i] == 0.0;
            if (!terminal && (tr.t[i] <= last_t || tr.t[i] >= g.T)) continue;
            last_t = tr.t[i];
            const double s = H - tr.tau[i];
            // OW blocks sit at both ends; the path value there is the pre-block one.
            const double xow = s <= 0.0 ? inst.x0 : (terminal ? 0.0 : ow.inventory(s));
            os << format_double(tr.t[i]) << ',' << format_double(tr.X[i]) << ','
               << format_double(ac.X[i]) << ',' << format_double(xow) << '\n';
        }
        write_text(cfg.output_dir / "compare.csv", os.str());

        ojson j;
        j["status"] = "ok";
        j["ow_sup_gap"] = r.ow_gap;
        j["ow_sup_gap_open_interval"] = r.ow_gap_open;
        j["ow_trim"] = cfg.ow_trim;
        j["ow_rho"] = r.ow_rho;
        j["ow_rho_is_average"] = !cfg.model.rho.is_constant();
        j["ac_sup_gap"] = r.ac_gap;
        j["ow_schedule"] = {{"initial_block", ow.initial_block},
                            {"rate", ow.rate},
                            {"terminal_block", ow.terminal_block}};
        write_json(cfg, "distances.json", j);
        log << "OW gap " << r.ow_gap << ", AC gap " << r.ac_gap << '\n';
        return kExitOk;
    } catch (const Error& e) {
        return fail(cfg, "distances.json", e, log);
    }
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    try {
        ojson checks = ojson::array();
        bool all_pass = true;
        model_checks(validate_params(cfg.model), cfg, "", checks, all_pass, true);

        if (cfg.battery && cfg.battery->count > 0) {
            const auto models = random_battery(cfg.seed, *cfg.battery);
            for (std::size_t i = 0; i < models.size(); ++i) {
                std::ostringstream p;
                p << "battery[" << i << "]/";
                model_checks(models[i], cfg, p.str(), checks, all_pass, false);
            }
        }

        if (cfg.solution_csv) {
            const RiccatiTable tab = read_riccati_csv(*cfg.solution_csv);
            const ModelParams model = validate_params(cfg.model);
            std::vector<double> tau(tab.t.size());
            for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = model.horizon_T - tab.t[i];
            const double closure = closure_residual(model, tau, tab.A, tab.B, tab.C, tab.D, tab.E);
            const CheckRecord c = make_check("closure", 1e-8 - closure, closure);
            checks.push_back(check_json(c, "solution/"));
            all_pass = all_pass && c.pass;
            const RiccatiSolution loaded = solution_from_table(model, tab, 1e-6 * model.horizon_T);
            for (const auto& b : check_a_priori_bounds(loaded, cfg.validate_tol).checks) {
                checks.push_back(check_json(b, "solution/bounds/"));
                all_pass = all_pass && b.pass;
            }
        }

        ojson j;
        j["status"] = "ok";
        j["all_pass"] = all_pass;
        j["tolerance"] = cfg.validate_tol;
        j["seed"] = cfg.seed;
        j["checks"] = checks;
        write_json(cfg, "validation.json", j);
        std::size_t failed = 0;
        for (const auto& c : checks) {
            if (!c["pass"].get<bool>()) {
                ++failed;
                log << "FAIL " << c["name"].get<std::string>() << '\n';
            }
        }
        log << checks.size() - failed << "/" << checks.size() << " checks passed\n";
        return all_pass ? kExitOk : kExitFailure;
    } catch (const Error& e) {
        return fail(cfg, "validation.json", e, log);
    }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.sweep) {
        log << "error: config has no sweep section\n";
        return kExitUsage;
    }
    const SweepSpec& s = *cfg.sweep;
    auto axis = [](const std::optional<std::vector<double>>& v, double base) {
        return v ? *v : std::vector<double>{base};
    };
    auto opt_axis = [](const std::optional<std::vector<double>>& v) {
        std::vector<std::optional<double>> out;
        if (v) {
            for (double x : *v) out.emplace_back(x);
        } else {
            out.emplace_back(std::nullopt);
        }
        return out;
    };
    for (const auto* v : {&s.eta, &s.gamma, &s.rho, &s.lambda}) {
        if (v->has_value() && (*v)->empty()) {
            log << "error: empty sweep range\n";
            return kExitUsage;
        }
    }
    if (!s.eta && !s.gamma && !s.rho && !s.lambda) {
        log << "error: sweep section lists no parameter\n";
        return kExitUsage;
    }
    const auto etas = axis(s.eta, cfg.model.eta);
    const auto gammas = axis(s.gamma, cfg.model.gamma);
    const auto rhos = opt_axis(s.rho);
    const auto lambdas = opt_axis(s.lambda);

    std::vector<ModelParams> cells;
    for (double e : etas)
        for (double g : gammas)
            for (const auto& r : rhos)
                for (const auto& l : lambdas) cells.push_back(cell_model(cfg.model, e, g, r, l));

    std::vector<std::string> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const ModelParams& m = cells[i];
            std::ostringstream os;
            os << format_double(m.eta) << ',' << format_double(m.gamma) << ','
               << coeff_label(m.rho) << ',' << coeff_label(m.lambda) << ',';
            try {
                const RiccatiSolution sol = solve_riccati(m, cfg.solver);
                ProblemInstance inst = cfg.instance;
                inst.model = m;
                const Trajectory tr = simulate_optimal(sol, inst, cfg.simulation);
                const CompareResult r = compare_paths(m, tr, inst.x0, cfg.ow_trim);
                os << format_double(value_function(sol, inst.t0, inst.x0, inst.y0)) << ','
                   << format_double(min_rate(tr)) << ',' << format_double(r.ow_gap) << ','
                   << format_double(r.ac_gap) << ",ok";
            } catch (const Error& e) {
                os << "nan,nan,nan,nan," << e.name();
            }
            rows[i] = os.str();
        }
    };
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(cells.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ostringstream out;
    out << "eta,gamma,rho,lambda,value,min_rate,ow_gap,ac_gap,status\n";
    bool any_failed = false;
    for (const auto& r : rows) {
        out << r << '\n';
        any_failed = any_failed || r.substr(r.rfind(',') + 1) != "ok";
    }
    write_text(cfg.output_dir / "summary.csv", out.str());
    log << cells.size() << " sweep cells written\n";
    return any_failed ? kExitFailure : kExitOk;
}

}  // namespace liqsched
