#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "liqsched/commands.hpp"
#include "liqsched/config.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> oracle_n;
    std::string solution;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", o.seed, "seed for the random model battery");
    sub->add_option("--oracle-n", o.oracle_n, "number of oracle steps")->check(CLI::Range(2, 4000));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal liquidation schedules with transient and persistent impact"};
    app.require_subcommand(1);
    Options o;
    auto* solve = app.add_subcommand("solve", "solve the Riccati system; writes riccati.csv");
    auto* simulate = app.add_subcommand("simulate", "optimal trajectory and its cost");
    auto* compare = app.add_subcommand("compare", "distance to the Almgren-Chriss and Obizhaeva-Wang schedules");
    auto* validate = app.add_subcommand("validate", "bound, asymptotic and oracle checks");
    auto* sweep = app.add_subcommand("sweep", "parameter grid summary");
    for (auto* s : {solve, simulate, compare, validate, sweep}) add_common(s, o);
    validate->add_option("--solution", o.solution, "riccati.csv to check instead of trusting the solver")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : liqsched::kExitUsage;
    }

    liqsched::RunConfig cfg;
    try {
        cfg = liqsched::load_config(o.config);
    } catch (const liqsched::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return liqsched::kExitUsage;
    }
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.oracle_n) cfg.oracle_N = *o.oracle_n;
    if (!o.solution.empty()) cfg.solution_csv = o.solution;

    try {
        if (*solve) return liqsched::cmd_solve(cfg, std::cout);
        if (*simulate) return liqsched::cmd_simulate(cfg, std::cout);
        if (*compare) return liqsched::cmd_compare(cfg, std::cout);
        if (*validate) return liqsched::cmd_validate(cfg, std::cout);
        if (*sweep) return liqsched::cmd_sweep(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return liqsched::kExitFailure;
    }
    return liqsched::kExitUsage;
}
