#include "liqsched/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace liqsched {

namespace {

using nlohmann::json;

CoefficientFn parse_coefficient(const json& j, const char* name) {
    if (j.is_number()) return CoefficientFn::constant(j.get<double>());
    if (!j.is_object()) {
        throw Error(ErrorCode::BadConfig, std::string(name) + " must be a number or an object");
    }
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") {
        if (j.contains("value")) return CoefficientFn::constant(j.at("value").get<double>());
        const auto v = j.at("values").get<std::vector<double>>();
        if (v.size() != 1) throw Error(ErrorCode::BadConfig, "constant coefficient takes one value");
        return CoefficientFn::constant(v.front());
    }
    const auto bp = j.at("breakpoints").get<std::vector<double>>();
    const auto v = j.at("values").get<std::vector<double>>();
    if (kind == "piecewise_constant") return CoefficientFn::piecewise_constant(bp, v);
    if (kind == "piecewise_linear") return CoefficientFn::piecewise_linear(bp, v);
    throw Error(ErrorCode::BadConfig, std::string(name) + ": unknown kind '" + kind + "'");
}

std::optional<std::vector<double>> opt_list(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<std::vector<double>>();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    try {
        const json root = json::parse(text);
        const json& m = root.at("model");
        cfg.model.eta = m.value("eta", 1.0);
        cfg.model.gamma = m.value("gamma", 0.0);
        cfg.model.horizon_T = m.value("T", 1.0);
        cfg.model.rho = m.contains("rho") ? parse_coefficient(m.at("rho"), "rho")
                                          : CoefficientFn::constant(0.0);
        cfg.model.lambda = m.contains("lambda") ? parse_coefficient(m.at("lambda"), "lambda")
                                                : CoefficientFn::constant(0.0);

        cfg.instance.model = cfg.model;
        if (root.contains("instance")) {
            const json& in = root.at("instance");
            cfg.instance.t0 = in.value("t0", 0.0);
            cfg.instance.x0 = in.value("x0", 1.0);
            cfg.instance.y0 = in.value("y0", 0.0);
        }
        cfg.solver.t0 = cfg.instance.t0;
        if (root.contains("solver")) {
            const json& s = root.at("solver");
            if (s.contains("delta")) cfg.solver.delta_override = s.at("delta").get<double>();
            cfg.solver.picard_tol = s.value("picard_tol", cfg.solver.picard_tol);
            cfg.solver.picard_max_iter = s.value("picard_max_iter", cfg.solver.picard_max_iter);
            cfg.solver.n_regular = s.value("n_regular", cfg.solver.n_regular);
            cfg.solver.n_singular = s.value("n_singular", cfg.solver.n_singular);
            cfg.solver.ratio = s.value("ratio", cfg.solver.ratio);
            cfg.solver.rk_step_fraction = s.value("rk_step_fraction", cfg.solver.rk_step_fraction);
        }
        if (root.contains("simulation")) {
            const json& s = root.at("simulation");
            cfg.simulation.substeps = s.value("substeps", cfg.simulation.substeps);
            cfg.simulation.terminal_tol = s.value("terminal_tol", cfg.simulation.terminal_tol);
        }
        if (root.contains("oracle")) cfg.oracle_N = root.at("oracle").value("N", cfg.oracle_N);
        if (root.contains("validate")) {
            const json& v = root.at("validate");
            cfg.validate_tol = v.value("tol", cfg.validate_tol);
            if (v.contains("solution")) cfg.solution_csv = v.at("solution").get<std::string>();
        }
        if (root.contains("compare")) cfg.ow_trim = root.at("compare").value("ow_trim", cfg.ow_trim);
        cfg.output_dir = root.value("output_dir", std::string("out"));
        cfg.seed = root.value("seed", std::uint64_t{0});
        if (root.contains("sweep")) {
            const json& s = root.at("sweep");
            SweepSpec sw;
            sw.eta = opt_list(s, "eta");
            sw.gamma = opt_list(s, "gamma");
            sw.rho = opt_list(s, "rho");
            sw.lambda = opt_list(s, "lambda");
            cfg.sweep = sw;
        }
        if (root.contains("battery")) {
            BatterySpec b;
            b.count = root.at("battery").value("count", b.count);
            cfg.battery = b;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadConfig, e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::BadConfig, "cannot read config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

}  // namespace liqsched
