#include "liqsched/battery.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace liqsched {

namespace {

CoefficientFn random_piecewise(std::mt19937_64& rng, double T, std::size_t max_pieces,
                               double sup) {
    std::uniform_int_distribution<std::size_t> pieces(1, max_pieces);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = pieces(rng);
    std::vector<double> values(n);
    for (double& v : values) v = sup * unit(rng);
    if (n == 1) return CoefficientFn::constant(values.front());
    std::vector<double> bp{0.0, T};
    while (bp.size() < n + 1) {
        const double b = T * (0.05 + 0.9 * unit(rng));
        // keep pieces at least 1% of T apart
        if (std::none_of(bp.begin(), bp.end(), [&](double x) { return std::abs(x - b) < 0.01 * T; })) {
            bp.push_back(b);
        }
    }
    std::sort(bp.begin(), bp.end());
    return CoefficientFn::piecewise_constant(std::move(bp), std::move(values));
}

}  // namespace

std::vector<ModelParams> random_battery(std::uint64_t seed, const BatterySpec& spec) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ModelParams> out;
    out.reserve(spec.count);
    const double l0 = std::log10(spec.eta_min);
    const double l1 = std::log10(spec.eta_max);
    for (std::size_t i = 0; i < spec.count; ++i) {
        ModelParams m;
        m.eta = std::pow(10.0, l0 + (l1 - l0) * unit(rng));
        m.gamma = spec.gamma_max * unit(rng);
        m.horizon_T = spec.T_min + (spec.T_max - spec.T_min) * unit(rng);
        m.rho = random_piecewise(rng, m.horizon_T, spec.max_pieces, spec.coeff_sup);
        m.lambda = random_piecewise(rng, m.horizon_T, spec.max_pieces, spec.coeff_sup);
        out.push_back(validate_params(m));
    }
    return out;
}

}  // namespace liqsched
