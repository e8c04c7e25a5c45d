#include "liqsched/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liqsched {

namespace {

void check_grid_spec(double t0, double T, double delta, std::size_t n_regular,
                     std::size_t n_singular, double ratio) {
    if (!(t0 < T)) {
        throw Error(ErrorCode::BadGridSpec, "grid needs t0 < T");
    }
    if (!(delta > 0.0) || delta > (T - t0) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::BadGridSpec, "grid needs 0 < delta <= T - t0");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error(ErrorCode::BadGridSpec, "geometric ratio must lie in (0, 1)");
    }
    if (n_regular < 2 || n_singular < 2) {
        throw Error(ErrorCode::BadGridSpec, "node counts must be >= 2");
    }
}

// Appends tau = delta * ratio^k for k = 1 .. n_singular - 1, then the terminal node.
void append_window(TimeGrid& g, std::size_t n_singular) {
    double tau = g.sing_window;
    for (std::size_t k = 1; k < n_singular; ++k) {
        tau *= g.ratio;
        g.tau.push_back(tau);
        g.t.push_back(g.T - tau);
    }
    g.tau.push_back(0.0);
    g.t.push_back(g.T);
}

}  // namespace

TimeGrid make_grid(double t0, double T, double delta, std::size_t n_regular,
                   std::size_t n_singular, double ratio) {
    check_grid_spec(t0, T, delta, n_regular, n_singular, ratio);
    TimeGrid g;
    g.t0 = t0;
    g.T = T;
    g.sing_window = delta;
    g.ratio = ratio;

    const double span = (T - delta) - t0;
    if (span <= 1e-14 * std::max(1.0, std::abs(T))) {
        g.t.push_back(t0);
        g.tau.push_back(delta);
    } else {
        for (std::size_t k = 0; k + 1 < n_regular; ++k) {
            const double t = t0 + span * static_cast<double>(k) / static_cast<double>(n_regular - 1);
            g.t.push_back(t);
            g.tau.push_back(T - t);
        }
        g.t.push_back(T - delta);
        g.tau.push_back(delta);
    }
    g.window_begin = g.tau.size() - 1;
    append_window(g, n_singular);
    return g;
}

TimeGrid make_solver_grid(double t0, double T, double delta, std::size_t n_regular,
                          std::size_t n_singular, double ratio,
                          std::span<const double> extra_t) {
    check_grid_spec(t0, T, delta, n_regular, n_singular, ratio);
    const double horizon = T - t0;
    const double h_reg = horizon / static_cast<double>(n_regular - 1);

    // Geometric transition outward from tau = delta.
    std::vector<double> outer{delta};
    for (;;) {
        const double next = outer.back() / ratio;
        if (next >= horizon || next - outer.back() > h_reg) {
            break;
        }
        outer.push_back(next);
    }

    struct Node {
        double t;
        double tau;
    };
    std::vector<Node> head;
    const double top = outer.back();
    const double rest = horizon - top;
    if (rest > 1e-14 * std::max(1.0, std::abs(T))) {
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(rest / h_reg - 1e-9)));
        for (std::size_t k = 0; k < m; ++k) {
            const double t = t0 + rest * static_cast<double>(k) / static_cast<double>(m);
            head.push_back({t, T - t});
        }
    }
    for (auto it = outer.rbegin(); it != outer.rend(); ++it) {
        head.push_back({T - *it, *it});
    }
    if (rest <= 1e-14 * std::max(1.0, std::abs(T))) {
        head.front().t = t0;
    }

    const double lo = t0;
    const double hi = T - delta;
    const double snap = 1e-12 * std::max(1.0, std::abs(T));
    for (double b : extra_t) {
        if (!(b > lo + snap && b < hi - snap)) {
            continue;
        }
        auto it = std::find_if(head.begin(), head.end(),
                               [&](const Node& n) { return std::abs(n.t - b) <= snap; });
        if (it != head.end()) {
            it->t = b;
            it->tau = T - b;
        } else {
            head.push_back({b, T - b});
        }
    }
    std::sort(head.begin(), head.end(), [](const Node& a, const Node& b) { return a.tau > b.tau; });

    TimeGrid g;
    g.t0 = t0;
    g.T = T;
    g.sing_window = delta;
    g.ratio = ratio;
    for (const auto& n : head) {
        g.t.push_back(n.t);
        g.tau.push_back(n.tau);
    }
    g.window_begin = g.tau.size() - 1;
    append_window(g, n_singular);
    return g;
}

std::vector<double> integrate_rk4(const VectorField& field, double t_from, double t_to,
                                  std::vector<double> y, std::size_t n_steps) {
    if (n_steps == 0) {
        return y;
    }
    const double h = (t_to - t_from) / static_cast<double>(n_steps);
    const std::size_t n = y.size();
    auto eval = [&](double t, const std::vector<double>& s) {
        auto k = field(t, s);
        for (double v : k) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFiniteField, "vector field returned a non-finite value");
            }
        }
        return k;
    };
    std::vector<double> tmp(n);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = t_from + h * static_cast<double>(step);
        const auto k1 = eval(t, y);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        const auto k2 = eval(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        const auto k3 = eval(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        const auto k4 = eval(t + h, tmp);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    return y;
}

Eigen::VectorXd solve_dense_linear(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != A.cols() || A.rows() != b.size()) {
        throw Error(ErrorCode::SingularMatrix, "dimension mismatch in dense solve");
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd& packed = lu.matrixLU();
    const Eigen::VectorXd pivots = packed.diagonal().cwiseAbs();
    const double scale = pivots.size() > 0 ? pivots.maxCoeff() : 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    if (pivots.size() > 0 &&
        (!(scale > 0.0) || pivots.minCoeff() <= static_cast<double>(A.rows()) * eps * scale)) {
        throw Error(ErrorCode::SingularMatrix, "matrix is numerically singular");
    }
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) {
        throw Error(ErrorCode::SingularMatrix, "dense solve produced non-finite values");
    }
    return x;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw Error(ErrorCode::OutOfRange, "monotone cubic needs >= 2 aligned samples");
    }
    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        m[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = m[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (m[k - 1] * m[k] <= 0.0) {
            d_[k] = 0.0;
        } else {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            d_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
        }
    }
    auto end_slope = [](double h0, double h1, double m0, double m1) {
        double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if (std::signbit(d) != std::signbit(m0) || m0 == 0.0) {
            d = 0.0;
        } else if (std::signbit(m0) != std::signbit(m1) && std::abs(d) > 3.0 * std::abs(m0)) {
            d = 3.0 * m0;
        }
        return d;
    };
    d_[0] = end_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

double MonotoneCubic::operator()(double x) const {
    if (x < x_.front() || x > x_.back()) {
        throw Error(ErrorCode::OutOfRange, "interpolation query outside the sampled span");
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (k >= x_.size() - 1) {
        return y_.back();
    }
    const double h = x_[k + 1] - x_[k];
    const double s = (x - x_[k]) / h;
    if (s == 0.0) {
        return y_[k];
    }
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

std::vector<double> interp_eval(const SampledFunction& f, double t) {
    const TimeGrid& g = f.grid;
    if (!(t >= g.t0) || !(t <= g.T)) {
        throw Error(ErrorCode::OutOfRange, "query time outside the grid span");
    }
    if (f.values.size() != g.size() || f.values.empty()) {
        throw Error(ErrorCode::OutOfRange, "sampled values do not match the grid");
    }
    const double tau = g.T - t;
    const std::size_t n = g.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = g.tau[n - 1 - i];
    const std::size_t dim = f.values.front().size();
    std::vector<double> out(dim);
    std::vector<double> y(n);
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t i = 0; i < n; ++i) y[i] = f.values[n - 1 - i][c];
        out[c] = MonotoneCubic(x, y)(std::clamp(tau, x.front(), x.back()));
    }
    return out;
}

std::vector<double> cumulative_quad4(std::span<const double> g, double h) {
    const std::size_t n = g.size();
    if (n < 4) {
        throw Error(ErrorCode::BadGridSpec, "fourth-order quadrature needs at least 4 samples");
    }
    std::vector<double> out(n, 0.0);
    const double c = h / 24.0;
    out[1] = c * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
    for (std::size_t k = 1; k + 2 < n; ++k) {
        out[k + 1] = out[k] + c * (-g[k - 1] + 13.0 * g[k] + 13.0 * g[k + 1] - g[k + 2]);
    }
    out[n - 1] = out[n - 2] + c * (g[n - 4] - 5.0 * g[n - 3] + 19.0 * g[n - 2] + 9.0 * g[n - 1]);
    return out;
}

}  // namespace liqsched
