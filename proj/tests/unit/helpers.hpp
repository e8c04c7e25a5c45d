#pragma once

#include <cmath>

#include "liqsched/model.hpp"

namespace testing {

inline liqsched::ModelParams constant_model(double eta, double gamma, double T, double rho,
                                            double lambda) {
    liqsched::ModelParams m;
    m.eta = eta;
    m.gamma = gamma;
    m.horizon_T = T;
    m.rho = liqsched::CoefficientFn::constant(rho);
    m.lambda = liqsched::CoefficientFn::constant(lambda);
    return m;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing
