#pragma once

#include <cstdint>
#include <vector>

#include "liqsched/model.hpp"

namespace liqsched {

struct BatterySpec {
    std::size_t count = 20;
    double eta_min = 0.01;
    double eta_max = 10.0;
    double gamma_max = 100.0;
    double coeff_sup = 10.0;
    double T_min = 0.5;
    double T_max = 2.0;
    std::size_t max_pieces = 4;
};

/// Reproducible random models: eta log-uniform, gamma uniform, rho and lambda
/// piecewise constant with random breakpoints and values in [0, coeff_sup].
std::vector<ModelParams> random_battery(std::uint64_t seed, const BatterySpec& spec = {});

}  // namespace liqsched
