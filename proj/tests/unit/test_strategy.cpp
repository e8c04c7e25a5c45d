#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "liqsched/benchmarks.hpp"
#include "liqsched/oracle.hpp"
#include "liqsched/strategy.hpp"

using namespace liqsched;
using testing::constant_model;

namespace {

ProblemInstance instance_of(const ModelParams& m, double x0 = 1.0, double y0 = 0.0) {
    ProblemInstance p;
    p.model = m;
    p.x0 = x0;
    p.y0 = y0;
    return p;
}

}  // namespace

TEST_CASE("feedback rate") {
    const auto vwap = solve_riccati(constant_model(1.0, 0.0, 1.0, 0.0, 0.0));
    CHECK(feedback_rate(vwap, 0.0, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(feedback_rate(vwap, 0.3, 0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(feedback_rate(vwap, 1.0, 1.0, 0.0), Error);
    CHECK_THROWS_AS(value_function(vwap, 1.2, 1.0, 0.0), Error);

    const auto flat = solve_riccati(constant_model(0.2, 4.0, 1.0, 0.0, 2.0));
    for (double t : {0.0, 0.4, 0.99}) {
        const auto p = flat.at(t);
        CHECK(p.E == 0.0);
        CHECK(feedback_rate(flat, t, 0.7, -3.0) == p.D * 0.7);
    }
}

TEST_CASE("value function") {
    const auto m = constant_model(0.2, 4.0, 1.0, 0.0, 2.0);
    const auto sol = solve_riccati(m);
    CHECK(value_function(sol, 0.3, 0.0, 5.0) == 0.0);
    for (double t : {0.0, 0.5, 0.9}) {
        const double v = value_function(sol, t, 1.3, -0.4);
        const double ref = rho_zero_value(m.eta, m.gamma, m.lambda, 1.0, t, 1.3, -0.4);
        CHECK(std::abs(v - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("closed-loop simulation") {
    SUBCASE("linear schedule") {
        const auto m = constant_model(1.0, 0.0, 1.0, 0.0, 0.0);
        const auto tr = simulate_optimal(solve_riccati(m), instance_of(m));
        CHECK(tr.X.back() == 0.0);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            CHECK(std::abs(tr.X[i] - tr.tau[i]) <= 1e-6);
            if (tr.tau[i] > 0.0) CHECK(std::abs(tr.xi[i] - 1.0) <= 1e-6);
            CHECK(tr.Y[i] == 0.0);
        }
    }
    SUBCASE("hyperbolic schedule") {
        const auto m = constant_model(1.0, 0.0, 1.0, 0.0, 4.0);
        const auto tr = simulate_optimal(solve_riccati(m), instance_of(m));
        for (std::size_t i = 0; i < tr.size(); ++i) {
            CHECK(std::abs(tr.X[i] - std::sinh(2.0 * tr.tau[i]) / std::sinh(2.0)) <= 1e-5);
        }
    }
    SUBCASE("small eta approaches the block-rate-block midpoint") {
        const auto m = constant_model(0.01, 100.0, 1.0, 1.0, 0.0);
        const auto tr = simulate_optimal(solve_riccati(m), instance_of(m));
        CHECK(std::abs(inventory_at(tr, 0.5) - 0.5) <= 0.05 * 0.5);
    }
    SUBCASE("liquidation and linear decay") {
        const auto m = constant_model(0.1, 100.0, 1.0, 1.0, 0.0);
        const auto tr = simulate_optimal(solve_riccati(m), instance_of(m, 1.0, 0.3));
        CHECK(tr.X.back() == 0.0);
        const double r = max_decay_ratio(tr);
        CHECK(std::isfinite(r));
        // X / tau settles to a finite limit inside the terminal window.
        const std::size_t n = tr.size();
        const double near = tr.X[n - 2] / tr.tau[n - 2];
        const double farther = tr.X[n - 100] / tr.tau[n - 100];
        CHECK(std::abs(near - farther) <= 1e-3 * std::max(1.0, std::abs(near)));
        CHECK(std::abs(near) <= r);
        for (double xi : tr.xi) CHECK(std::isfinite(xi));
    }
    SUBCASE("linearity in the initial state") {
        const auto m = constant_model(0.1, 100.0, 1.0, 1.0, 0.5);
        const auto sol = solve_riccati(m);
        const auto a = simulate_optimal(sol, instance_of(m, 1.0, 0.2));
        const auto b = simulate_optimal(sol, instance_of(m, -2.5, -0.5));
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(std::abs(-2.5 * a.X[i] - b.X[i]) <= 1e-10 * std::max(1.0, std::abs(b.X[i])));
            CHECK(std::abs(-2.5 * a.Y[i] - b.Y[i]) <= 1e-10 * std::max(1.0, std::abs(b.Y[i])));
            CHECK(std::abs(-2.5 * a.xi[i] - b.xi[i]) <= 1e-10 * std::max(1.0, std::abs(b.xi[i])));
        }
    }
    SUBCASE("late start") {
        const auto m = constant_model(1.0, 0.0, 1.0, 0.0, 0.0);
        auto inst = instance_of(m);
        inst.t0 = 0.5;
        SolverConfig cfg;
        cfg.t0 = 0.5;
        const auto tr = simulate_optimal(solve_riccati(m, cfg), inst);
        CHECK(tr.t.front() == 0.5);
        CHECK(std::abs(tr.xi.front() - 2.0) <= 1e-6);
        inst.t0 = 0.2;
        CHECK_THROWS_AS(simulate_optimal(solve_riccati(m, cfg), inst), Error);
    }
    SUBCASE("terminal miss") {
        const auto m = constant_model(1.0, 0.0, 1.0, 0.0, 0.0);
        SimulationOptions opt;
        opt.terminal_tol = 1e-300;
        try {
            simulate_optimal(solve_riccati(m), instance_of(m), opt);
            FAIL("expected TerminalMiss");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TerminalMiss);
        }
    }
}

TEST_CASE("running cost") {
    const auto vwap_m = constant_model(1.0, 0.0, 1.0, 0.0, 0.0);
    SUBCASE("unit rate") {
        Trajectory tr;
        for (int i = 0; i <= 10; ++i) {
            tr.t.push_back(i / 10.0);
            tr.tau.push_back(1.0 - i / 10.0);
            tr.X.push_back(1.0 - i / 10.0);
            tr.Y.push_back(0.0);
            tr.xi.push_back(1.0);
        }
        const auto c = cost_of_trajectory(vwap_m, tr);
        CHECK(c.total == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(c.persistent == 0.0);
        CHECK(c.risk == 0.0);
    }
    SUBCASE("linear schedule cost equals the value") {
        const auto sol = solve_riccati(vwap_m);
        const auto tr = simulate_optimal(sol, instance_of(vwap_m));
        const auto c = cost_of_trajectory(vwap_m, tr);
        CHECK(c.total == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(value_function(sol, 0.0, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("parts add up and persistent part is half gamma x^2 without resilience") {
        const double gamma = 3.0;
        const auto m = constant_model(0.2, gamma, 1.0, 0.0, 2.0);
        const auto sol = solve_riccati(m);
        SimulationOptions opt;
        opt.substeps = 4;
        const auto tr = simulate_optimal(sol, instance_of(m, 1.5, 0.0), opt);
        const auto c = cost_of_trajectory(m, tr);
        CHECK(std::abs(c.total - (c.instantaneous + c.persistent + c.risk)) <= 1e-12 * c.total);
        CHECK(std::abs(c.persistent - 0.5 * gamma * 1.5 * 1.5) <= 1e-5);

        const SineBump bump{0.1, 0.9, 2.0};
        const auto p = perturb_trajectory(
            m, tr, [&](double t) { return bump(t); }, [&](double t) { return bump.integral(t); }, 0.3);
        CHECK(std::abs(cost_of_trajectory(m, p).persistent - 0.5 * gamma * 1.5 * 1.5) <= 1e-5);
    }
}

TEST_CASE("self-consistency and suboptimality") {
    const auto m = constant_model(0.1, 100.0, 1.0, 1.0, 0.0);
    const auto sol = solve_riccati(m);
    SimulationOptions opt;
    opt.substeps = 8;
    const auto tr = simulate_optimal(sol, instance_of(m), opt);
    const double V = value_function(sol, 0.0, 1.0, 0.0);
    const double cost = cost_of_trajectory(m, tr).total;
    CHECK(std::abs(cost - V) <= 1e-3 * V);

    const SineBump bump{0.1, 0.9, 5.0};
    CHECK(std::abs(bump.integral(0.9)) <= 1e-15);
    for (double eps : {0.1, -0.1, 0.01, -0.01}) {
        const auto p = perturb_trajectory(
            m, tr, [&](double t) { return bump(t); }, [&](double t) { return bump.integral(t); }, eps);
        CHECK(std::abs(p.X.back()) <= 1e-15);
        CHECK(cost_of_trajectory(m, p).total >= V - 1e-9);
    }
}

TEST_CASE("value against the discrete oracle") {
    const auto m = constant_model(0.1, 100.0, 1.0, 1.0, 0.0);
    const double V = value_function(solve_riccati(m), 0.0, 1.0, 0.0);
    const double O = oracle_value(instance_of(m), 2000);
    CHECK(std::abs(V - O) <= 0.01 * V);
    CHECK(V <= O * 1.005);
}

TEST_CASE("2x2 exponential") {
    // diagonal
    auto e = expm2({-1.0, 0.0, 0.0, -2.0});
    CHECK(e[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(e[3] == doctest::Approx(std::exp(-2.0)));
    CHECK(e[1] == 0.0);
    // nilpotent part: exp([[a, b], [0, a]]) = e^a [[1, b], [0, 1]]
    e = expm2({-0.5, 3.0, 0.0, -0.5});
    CHECK(e[0] == doctest::Approx(std::exp(-0.5)));
    CHECK(e[1] == doctest::Approx(3.0 * std::exp(-0.5)));
    CHECK(e[2] == 0.0);
    // rotation
    e = expm2({0.0, -1.0, 1.0, 0.0});
    CHECK(e[0] == doctest::Approx(std::cos(1.0)));
    CHECK(e[1] == doctest::Approx(-std::sin(1.0)));
    CHECK(e[2] == doctest::Approx(std::sin(1.0)));
    // huge decay stays finite
    e = expm2({-1e6, 1.0, 50.0, -2.0});
    for (double v : e) CHECK(std::isfinite(v));
}

TEST_CASE("trajectory helpers") {
    Trajectory tr;
    tr.t = {0.0, 0.5, 1.0};
    tr.tau = {1.0, 0.5, 0.0};
    tr.X = {1.0, 0.4, 0.0};
    tr.xi = {1.5, -0.2, 0.3};
    tr.Y = {0.0, 0.0, 0.0};
    CHECK(inventory_at(tr, 0.25) == doctest::Approx(0.7));
    CHECK_THROWS_AS(inventory_at(tr, 1.5), Error);
    CHECK(min_rate(tr) == -0.2);
    CHECK(max_decay_ratio(tr) == doctest::Approx(1.0));
}
