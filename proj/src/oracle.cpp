#include "liqsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "liqsched/numerics.hpp"

namespace liqsched {

namespace {

struct StepData {
    double dt;
    std::vector<double> t;
    std::vector<double> decay;  ///< e^{-rho_k dt}
    std::vector<double> gain;   ///< gamma (1 - e^{-rho_k dt}) / rho_k
    std::vector<double> omega;  ///< trapezoid weight of lambda X_k^2
};

StepData step_data(const ProblemInstance& inst, std::size_t N) {
    const ModelParams& m = inst.model;
    StepData s;
    s.dt = (m.horizon_T - inst.t0) / static_cast<double>(N);
    s.t.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        s.t[k] = inst.t0 + s.dt * static_cast<double>(k);
    }
    s.t[N] = m.horizon_T;
    s.decay.resize(N);
    s.gain.resize(N);
    s.omega.assign(N + 1, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        const double rho = m.rho(s.t[k]);
        const double x = rho * s.dt;
        s.decay[k] = std::exp(-x);
        s.gain[k] = x < 1e-10 ? m.gamma * s.dt * (1.0 - 0.5 * x) : m.gamma * -std::expm1(-x) / rho;
        // lambda evaluated inside the step's own piece at both ends
        const std::size_t piece = m.lambda.piece_at(0.5 * (s.t[k] + s.t[k + 1]));
        s.omega[k] += 0.25 * s.dt * m.lambda.in_piece(piece, s.t[k]);
        s.omega[k + 1] += 0.25 * s.dt * m.lambda.in_piece(piece, s.t[k + 1]);
    }
    return s;
}

}  // namespace

QuadraticProgram discretize_problem(const ProblemInstance& instance, std::size_t N) {
    validate_instance(instance);
    if (N < 2 || N > kOracleMaxN) {
        throw Error(ErrorCode::BadConfig, "oracle N must lie in [2, 4000]");
    }
    const ModelParams& m = instance.model;
    const StepData s = step_data(instance, N);
    const double dt = s.dt;
    const double x0 = instance.x0;
    const double y0 = instance.y0;

    QuadraticProgram qp;
    qp.instance = instance;
    qp.N = N;
    qp.dt = dt;
    qp.Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    qp.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    qp.a = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), dt);
    qp.b = x0;

    // Y_k = alpha_k y0 + sum_{j<k} c_{k,j} xi_j.
    std::vector<double> alpha(N + 1);
    alpha[0] = 1.0;
    for (std::size_t k = 0; k < N; ++k) alpha[k + 1] = s.decay[k] * alpha[k];

    // Cross term 0.5 dt xi_k (Y_k + Y_{k+1}).
    for (std::size_t j = 0; j < N; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        qp.Q(J, J) += m.eta * dt + dt * s.gain[j];
        double c_kj = s.gain[j];  // c_{j+1, j}
        for (std::size_t k = j + 1; k < N; ++k) {
            const double c_next = s.decay[k] * c_kj;
            const double v = 0.5 * dt * (c_kj + c_next);
            const auto K = static_cast<Eigen::Index>(k);
            qp.Q(K, J) += v;
            qp.Q(J, K) += v;
            c_kj = c_next;
        }
        qp.c(J) += 0.5 * dt * (alpha[j] + alpha[j + 1]) * y0;
    }

    // Risk sum_k omega_k (x0 - dt sum_{j<k} xi_j)^2 with tail sums W_m = sum_{k>m} omega_k.
    std::vector<double> W(N + 1, 0.0);
    for (std::size_t k = N; k-- > 0;) W[k] = W[k + 1] + s.omega[k + 1];
    double omega_total = 0.0;
    for (double w : s.omega) omega_total += w;
    for (std::size_t i = 0; i < N; ++i) {
        const auto I = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < N; ++j) {
            qp.Q(I, static_cast<Eigen::Index>(j)) += 2.0 * dt * dt * W[std::max(i, j)];
        }
        qp.c(I) += -2.0 * x0 * dt * W[i];
    }

    qp.constant = x0 * x0 * omega_total;
    return qp;
}

double discrete_cost(const ProblemInstance& instance, const std::vector<double>& xi,
                     std::vector<double>* X_path, std::vector<double>* Y_path) {
    const ModelParams& m = instance.model;
    const std::size_t N = xi.size();
    const StepData s = step_data(instance, N);
    std::vector<double> X(N + 1), Y(N + 1);
    X[0] = instance.x0;
    Y[0] = instance.y0;
    double cost = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        X[k + 1] = X[k] - xi[k] * s.dt;
        Y[k + 1] = s.decay[k] * Y[k] + s.gain[k] * xi[k];
        cost += 0.5 * m.eta * xi[k] * xi[k] * s.dt + 0.5 * s.dt * xi[k] * (Y[k] + Y[k + 1]);
    }
    for (std::size_t k = 0; k <= N; ++k) cost += s.omega[k] * X[k] * X[k];
    if (X_path) *X_path = std::move(X);
    if (Y_path) *Y_path = std::move(Y);
    return cost;
}

DiscreteStrategy solve_kkt(const QuadraticProgram& qp) {
    const auto N = static_cast<Eigen::Index>(qp.N);
    if (qp.Q.rows() != N || qp.Q.cols() != N || qp.c.size() != N || qp.a.size() != N) {
        throw Error(ErrorCode::SingularKKT, "malformed quadratic program");
    }
    if (!qp.Q.isApprox(qp.Q.transpose(), 1e-12)) {
        throw Error(ErrorCode::NonConvex, "Q is not symmetric");
    }

    // Convexity on {a' xi = 0}: reflect a onto e_0 and test the trailing block.
    {
        Eigen::VectorXd v = qp.a.normalized();
        v(0) += v(0) >= 0.0 ? 1.0 : -1.0;
        const double vv = v.squaredNorm();
        const Eigen::VectorXd Qv = qp.Q * v;
        const double vQv = v.dot(Qv);
        // H Q H with H = I - 2 v v' / vv, formed with rank-one updates.
        Eigen::MatrixXd P = qp.Q;
        P.noalias() -= (2.0 / vv) * (v * Qv.transpose() + Qv * v.transpose());
        P.noalias() += (4.0 * vQv / (vv * vv)) * (v * v.transpose());
        Eigen::MatrixXd Z = P.bottomRightCorner(N - 1, N - 1);
        Z.diagonal().array() += 1e-9;
        Eigen::LLT<Eigen::MatrixXd> llt(Z);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::NonConvex,
                        "projected Hessian has an eigenvalue below -1e-9");
        }
    }

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N + 1, N + 1);
    K.topLeftCorner(N, N) = qp.Q;
    K.block(0, N, N, 1) = qp.a;
    K.block(N, 0, 1, N) = qp.a.transpose();
    Eigen::VectorXd rhs(N + 1);
    rhs.head(N) = -qp.c;
    rhs(N) = qp.b;
    Eigen::VectorXd sol;
    try {
        sol = solve_dense_linear(K, rhs);
    } catch (const Error& e) {
        throw Error(ErrorCode::SingularKKT, e.what());
    }
    const double resid = (K * sol - rhs).norm();
    const double scale = std::max(rhs.norm(), 1e-300);
    if (!(resid <= 1e-9 * scale)) {
        std::ostringstream os;
        os << "KKT residual " << resid << " exceeds 1e-9 * |rhs| = " << 1e-9 * scale;
        throw Error(ErrorCode::SingularKKT, os.str());
    }

    DiscreteStrategy out;
    out.kkt_residual = resid / scale;
    out.min_projected_eig_bound = -1e-9;
    out.xi.assign(sol.data(), sol.data() + N);
    out.cost = discrete_cost(qp.instance, out.xi, &out.X_path, &out.Y_path);
    out.X_path.back() = 0.0;
    const StepData s = step_data(qp.instance, qp.N);
    out.t = s.t;
    return out;
}

double oracle_value(const ProblemInstance& instance, std::size_t N) {
    return solve_kkt(discretize_problem(instance, N)).cost;
}

}  // namespace liqsched
