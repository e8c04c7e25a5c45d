#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "liqsched/model.hpp"

namespace liqsched {

/// Cost 0.5 xi' Q xi + c' xi + constant subject to a' xi = b.
struct QuadraticProgram {
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
    double constant = 0.0;
    Eigen::VectorXd a;
    double b = 0.0;

    ProblemInstance instance;
    std::size_t N = 0;
    double dt = 0.0;
};

struct DiscreteStrategy {
    std::vector<double> t;       ///< N + 1 step boundaries
    std::vector<double> xi;      ///< N per-step rates
    std::vector<double> X_path;  ///< N + 1
    std::vector<double> Y_path;  ///< N + 1
    double cost = 0.0;
    double kkt_residual = 0.0;
    double min_projected_eig_bound = 0.0;  ///< shift used in the convexity test
};

inline constexpr std::size_t kOracleMaxN = 4000;

/// Piecewise-constant rates on N uniform steps; Y propagated exactly with rho
/// frozen at each step's left end; trapezoid in X and Y, exact in xi.
QuadraticProgram discretize_problem(const ProblemInstance& instance, std::size_t N);

/// KKT solve plus convexity test on the constraint null space.
DiscreteStrategy solve_kkt(const QuadraticProgram& qp);

double oracle_value(const ProblemInstance& instance, std::size_t N);

/// Direct evaluation of the discrete cost of given per-step rates.
double discrete_cost(const ProblemInstance& instance, const std::vector<double>& xi,
                     std::vector<double>* X_path = nullptr, std::vector<double>* Y_path = nullptr);

}  // namespace liqsched
