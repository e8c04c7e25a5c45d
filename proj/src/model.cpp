#include "liqsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liqsched {

CoefficientFn CoefficientFn::constant(double value) {
    CoefficientFn fn;
    fn.kind_ = Kind::Constant;
    fn.values_ = {value};
    return fn;
}

CoefficientFn CoefficientFn::piecewise_constant(std::vector<double> breakpoints,
                                                std::vector<double> values) {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size()) {
        throw Error(ErrorCode::BadBreakpoints,
                    "piecewise_constant needs n+1 breakpoints for n values");
    }
    CoefficientFn fn;
    fn.kind_ = Kind::PiecewiseConstant;
    fn.breakpoints_ = std::move(breakpoints);
    fn.values_ = std::move(values);
    return fn;
}

CoefficientFn CoefficientFn::piecewise_linear(std::vector<double> breakpoints,
                                              std::vector<double> values) {
    if (breakpoints.size() < 2 || values.size() != breakpoints.size()) {
        throw Error(ErrorCode::BadBreakpoints,
                    "piecewise_linear needs one value per breakpoint");
    }
    CoefficientFn fn;
    fn.kind_ = Kind::PiecewiseLinear;
    fn.breakpoints_ = std::move(breakpoints);
    fn.values_ = std::move(values);
    return fn;
}

bool CoefficientFn::is_constant() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [&](double v) { return v == values_.front(); });
}

std::size_t CoefficientFn::piece_at(double t) const noexcept {
    if (kind_ == Kind::Constant) {
        return 0;
    }
    const std::size_t pieces = breakpoints_.size() - 1;
    // first breakpoint strictly greater than t, minus one
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t idx = it == breakpoints_.begin()
                          ? 0
                          : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return std::min(idx, pieces - 1);
}

double CoefficientFn::in_piece(std::size_t piece, double t) const noexcept {
    switch (kind_) {
        case Kind::Constant:
            return values_.front();
        case Kind::PiecewiseConstant:
            return values_[piece];
        case Kind::PiecewiseLinear: {
            const double a = breakpoints_[piece];
            const double b = breakpoints_[piece + 1];
            const double w = (t - a) / (b - a);
            return values_[piece] + w * (values_[piece + 1] - values_[piece]);
        }
    }
    return 0.0;
}

double CoefficientFn::operator()(double t) const noexcept {
    return in_piece(piece_at(t), t);
}

double CoefficientFn::integral(double a, double b) const noexcept {
    if (kind_ == Kind::Constant) {
        return values_.front() * (b - a);
    }
    double total = 0.0;
    const std::size_t pieces = breakpoints_.size() - 1;
    for (std::size_t i = 0; i < pieces; ++i) {
        const double lo = std::max(a, breakpoints_[i]);
        const double hi = std::min(b, breakpoints_[i + 1]);
        if (hi <= lo) {
            continue;
        }
        total += 0.5 * (in_piece(i, lo) + in_piece(i, hi)) * (hi - lo);
    }
    return total;
}

double CoefficientFn::sup() const noexcept {
    return *std::max_element(values_.begin(), values_.end());
}

double CoefficientFn::inf() const noexcept {
    return *std::min_element(values_.begin(), values_.end());
}

std::vector<double> CoefficientFn::interior_breakpoints() const {
    if (breakpoints_.size() <= 2) {
        return {};
    }
    return {breakpoints_.begin() + 1, breakpoints_.end() - 1};
}

namespace {

void validate_coefficient(const CoefficientFn& fn, double T, const char* name) {
    for (double v : fn.values()) {
        if (!std::isfinite(v) || v < 0.0) {
            std::ostringstream os;
            os << name << " must be nonnegative and bounded (found " << v << ")";
            throw Error(ErrorCode::NegativeCoefficient, os.str());
        }
    }
    if (fn.kind() == CoefficientFn::Kind::Constant) {
        return;
    }
    const auto& bp = fn.breakpoints();
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (!(bp[i] > bp[i - 1])) {
            throw Error(ErrorCode::BadBreakpoints,
                        std::string(name) + " breakpoints must be strictly increasing");
        }
    }
    const double tol = 1e-12 * std::max(1.0, T);
    if (std::abs(bp.front()) > tol || std::abs(bp.back() - T) > tol) {
        throw Error(ErrorCode::BadBreakpoints,
                    std::string(name) + " breakpoints must cover [0, T]");
    }
}

}  // namespace

ModelParams validate_params(const ModelParams& raw) {
    if (!(raw.eta > 0.0) || !std::isfinite(raw.eta)) {
        throw Error(ErrorCode::NonpositiveEta, "instantaneous impact eta must be > 0");
    }
    if (!(raw.gamma >= 0.0) || !std::isfinite(raw.gamma)) {
        throw Error(ErrorCode::NegativeGamma, "inverse depth gamma must be >= 0");
    }
    if (!(raw.horizon_T > 0.0) || !std::isfinite(raw.horizon_T)) {
        throw Error(ErrorCode::NonpositiveHorizon, "horizon T must be > 0");
    }
    validate_coefficient(raw.rho, raw.horizon_T, "rho");
    validate_coefficient(raw.lambda, raw.horizon_T, "lambda");
    return raw;
}

void validate_instance(const ProblemInstance& instance) {
    validate_params(instance.model);
    if (!(instance.t0 >= 0.0) || !(instance.t0 < instance.model.horizon_T)) {
        throw Error(ErrorCode::BadInstance, "t0 must lie in [0, T)");
    }
    if (!std::isfinite(instance.x0) || !std::isfinite(instance.y0)) {
        throw Error(ErrorCode::BadInstance, "initial state must be finite");
    }
}

double kappa(const ModelParams& model) {
    const double m = std::max(model.lambda.sup(), model.gamma * model.rho.sup());
    return std::sqrt(2.0 * m / model.eta);
}

double ball_radius(const ModelParams& model) {
    const double T = model.horizon_T;
    const double g = model.gamma;
    return 4.0 * std::max(T * model.lambda.sup() + g * g * T / model.eta + 2.0 * g,
                          model.rho.sup());
}

double driver_lipschitz_bound(const ModelParams& model, double R, double tau_max) {
    const double eta = model.eta;
    const double g = model.gamma;
    const double rho = model.rho.sup();
    const double tau = tau_max;
    // On the ball |H|,|G|,|P| <= tau^2 R the combinations
    //   u = H/tau - gamma (tau + G),  v = gamma P - G/tau
    // satisfy |u| <= tau * u_bar and |v| <= tau * v_bar.
    const double u_bar = R + g + g * tau * R;
    const double v_bar = R + g * tau * R;
    const double row_h = 2.0 * u_bar / eta + 2.0 * g * tau * u_bar / eta + 2.0 * g;
    const double row_g = v_bar / eta + rho + (u_bar + g * tau * v_bar) / eta
                         + g * tau * u_bar / eta + g;
    const double row_p = 2.0 * v_bar / eta + 2.0 * rho + 2.0 * g * tau * v_bar / eta;
    return std::max({row_h, row_g, row_p});
}

ContractionConstants contraction_constants(const ModelParams& model) {
    ContractionConstants c;
    const double T = model.horizon_T;
    c.R = ball_radius(model);
    if (!(c.R > 0.0)) {
        c.R = 1.0;
    }
    // The bound is nondecreasing in tau, so evaluating it at the largest
    // admissible window T/2 covers every delta <= T/2.
    c.L = driver_lipschitz_bound(model, c.R, 0.5 * T);
    c.delta = std::min(1.0 / (2.0 * c.L), 0.5 * T);
    return c;
}

CoefficientValues eval_coefficients(const ModelParams& model, double t) {
    if (!(t >= 0.0) || !(t <= model.horizon_T)) {
        throw Error(ErrorCode::OutOfRange, "coefficient query outside [0, T]");
    }
    return {model.rho(t), model.lambda(t)};
}

}  // namespace liqsched
