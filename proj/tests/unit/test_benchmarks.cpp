#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "liqsched/benchmarks.hpp"

using namespace liqsched;
using testing::constant_model;

namespace {

// Exact flow of dA/dtau = lambda - A^2/eta over a step of length d.
double scalar_flow(double eta, double lambda, double A0, double d) {
    if (lambda == 0.0) return 1.0 / (1.0 / A0 + d / eta);
    const double c = std::sqrt(eta * lambda);
    const double th = std::tanh(c / eta * d);
    return c * (A0 + c * th) / (c + A0 * th);
}

}  // namespace

TEST_CASE("hyperbolic reference schedule") {
    const auto g = make_grid(0.0, 1.0, 0.1, 101, 20, 0.5);
    const auto lin = almgren_chriss_trajectory(1.0, 0.0, 1.0, 1.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(lin.X[i] == doctest::Approx(g.tau[i]));
        CHECK(lin.xi[i] == doctest::Approx(1.0));
        CHECK(lin.Y[i] == 0.0);
    }
    TimeGrid mid;
    mid.t = {0.5};
    mid.tau = {0.5};
    const auto h = almgren_chriss_trajectory(1.0, 4.0, 1.0, 1.0, mid);
    CHECK(h.X[0] == doctest::Approx(0.324027).epsilon(1e-6));
    CHECK(h.X[0] == doctest::Approx(std::sinh(1.0) / std::sinh(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(almgren_chriss_trajectory(0.0, 1.0, 1.0, 1.0, g), Error);
    CHECK_THROWS_AS(almgren_chriss_trajectory(1.0, -1.0, 1.0, 1.0, g), Error);
}

TEST_CASE("reference schedule matches the full solver without depth") {
    SUBCASE("constant risk") {
        const auto m = constant_model(1.0, 0.0, 1.0, 2.0, 4.0);
        ProblemInstance p;
        p.model = m;
        const auto tr = simulate_optimal(solve_riccati(m), p);
        TimeGrid g;
        g.t = tr.t;
        g.tau = tr.tau;
        g.T = 1.0;
        const auto ac = almgren_chriss_trajectory(1.0, 4.0, 1.0, 1.0, g);
        for (std::size_t i = 0; i < tr.size(); ++i) CHECK(std::abs(tr.X[i] - ac.X[i]) <= 1e-5);
    }
    SUBCASE("time-varying risk") {
        auto m = constant_model(0.5, 0.0, 1.0, 0.0, 0.0);
        m.lambda = CoefficientFn::piecewise_constant({0.0, 0.3, 0.8, 1.0}, {6.0, 1.0, 3.0});
        ProblemInstance p;
        p.model = m;
        const auto tr = simulate_optimal(solve_riccati(m), p);
        TimeGrid g;
        g.t = tr.t;
        g.tau = tr.tau;
        g.T = 1.0;
        const auto ac = almgren_chriss_reference(m.eta, m.lambda, 1.0, 1.0, g);
        for (std::size_t i = 0; i < tr.size(); ++i) CHECK(std::abs(tr.X[i] - ac.X[i]) <= 1e-5);
    }
}

TEST_CASE("block-rate-block schedule") {
    const auto s = obizhaeva_wang_schedule(1.0, 1.0, 1.0);
    CHECK(s.initial_block == doctest::Approx(1.0 / 3.0));
    CHECK(s.terminal_block == doctest::Approx(1.0 / 3.0));
    CHECK(s.rate == doctest::Approx(1.0 / 3.0));
    CHECK(s.inventory(0.5) == doctest::Approx(0.5));

    const auto z = obizhaeva_wang_schedule(0.0, 2.0, 3.0);
    CHECK(z.initial_block == 1.5);
    CHECK(z.terminal_block == 1.5);
    CHECK(z.rate == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 10.0);
    for (int k = 0; k < 50; ++k) {
        const double rho = U(rng), T = 0.1 + U(rng), x0 = U(rng) - 5.0;
        const auto w = obizhaeva_wang_schedule(rho, T, x0);
        CHECK(std::abs(w.initial_block + w.rate * T + w.terminal_block - x0) <= 1e-12 * std::max(1.0, std::abs(x0)));
    }
    CHECK_THROWS_AS(obizhaeva_wang_schedule(-1.0, 1.0, 1.0), Error);
}

TEST_CASE("scalar singular Riccati solution") {
    const auto zero = CoefficientFn::constant(0.0);
    CHECK(scalar_A_tilde_at(1.0, zero, 1.0, 0.25) == doctest::Approx(4.0).epsilon(1e-14));
    const auto four = CoefficientFn::constant(4.0);
    CHECK(scalar_A_tilde_at(1.0, four, 1.0, 1.0) == doctest::Approx(2.0 / std::tanh(2.0)).epsilon(1e-14));
    CHECK(scalar_A_tilde_at(1.0, four, 1.0, 1.0) == doctest::Approx(2.0746294).epsilon(1e-7));

    SUBCASE("sandwich") {
        for (double lam : {0.5, 4.0, 50.0}) {
            const double eta = 0.3;
            const double k = std::sqrt(2.0 * lam / eta);
            for (double tau : {1e-6, 0.01, 0.5, 2.0}) {
                const double a = scalar_A_tilde_at(eta, CoefficientFn::constant(lam), 2.0, tau);
                CHECK(a >= eta / tau);
                CHECK(a <= eta * k / std::tanh(k * tau));
            }
        }
    }
    SUBCASE("piecewise risk against exact piece flows") {
        const double eta = 0.4, T = 1.0;
        const auto lam = CoefficientFn::piecewise_constant({0.0, 0.25, 0.6, 1.0}, {2.0, 0.0, 9.0});
        // last piece: closed form; earlier pieces: exact flow from the breakpoint value
        const double c3 = std::sqrt(eta * 9.0);
        const double A_06 = c3 / std::tanh(c3 / eta * 0.4);
        const double A_025 = scalar_flow(eta, 0.0, A_06, 0.35);
        const double A_0 = scalar_flow(eta, 2.0, A_025, 0.25);
        CHECK(std::abs(scalar_A_tilde_at(eta, lam, T, 0.4) / A_06 - 1.0) <= 1e-8);
        CHECK(std::abs(scalar_A_tilde_at(eta, lam, T, 0.75) / A_025 - 1.0) <= 1e-8);
        CHECK(std::abs(scalar_A_tilde_at(eta, lam, T, 1.0) / A_0 - 1.0) <= 1e-8);
        CHECK(std::abs(scalar_A_tilde_at(eta, lam, T, 0.1) - c3 / std::tanh(c3 / eta * 0.1)) <= 1e-8 * 10);

        const auto g = make_grid(0.0, T, 0.1, 11, 10, 0.5);
        const auto f = scalar_A_tilde(eta, lam, T, g);
        CHECK(std::isinf(f.values.back()[0]));
        CHECK(f.values.back()[1] == 0.0);
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            CHECK(f.values[i][0] - eta / g.tau[i] == doctest::Approx(f.values[i][1]).epsilon(1e-9));
        }
    }
    SUBCASE("full solver without resilience, piecewise risk") {
        auto m = constant_model(0.4, 7.0, 1.0, 0.0, 0.0);
        m.lambda = CoefficientFn::piecewise_constant({0.0, 0.5, 1.0}, {5.0, 1.0});
        const auto sol = solve_riccati(m);
        for (std::size_t i = 0; i + 1 < sol.size(); i += 11) {
            const double At = scalar_A_tilde_at(m.eta, m.lambda, 1.0, sol.grid().tau[i]);
            CHECK(std::abs(sol.A()[i] - m.gamma - At) <= 1e-6 * std::max(1.0, At));
            CHECK(sol.B()[i] == 1.0);
            CHECK(sol.C()[i] == 0.0);
        }
    }
}

TEST_CASE("value without resilience") {
    const auto zero = CoefficientFn::constant(0.0);
    CHECK(rho_zero_value(1.0, 2.0, zero, 2.0, 1.0, 0.0, 3.0) == 0.0);
    CHECK(rho_zero_value(1.0, 2.0, zero, 2.0, 1.0, 1.0, 3.0) == doctest::Approx(4.5).epsilon(1e-14));
}
