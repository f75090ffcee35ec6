#pragma once

#include "rrl/dual.hpp"

#include <cstdint>
#include <vector>

namespace rrl {

struct OracleCheckOptions {
    std::size_t instances = 200;
    std::size_t support = 3;
    double resolution = 1e-3;
    double value_scale = 10.0;
    std::uint64_t seed = 7;
    DualSolverConfig dual_cfg;
};

struct OracleCheckReport {
    std::size_t instances = 0;
    std::size_t failures = 0;
    /// Largest |dual - oracle| divided by the allowed discrepancy; <= 1 means all passed.
    double worst_ratio = 0.0;
    double worst_abs_error = 0.0;
};

/// Allowed |dual - oracle| discrepancy: 1e-3 of the value range plus the oracle's grid slack.
double oracle_tolerance(std::span<const double> values, double resolution);

/// Compares the dual solver against the brute-force primal oracle on random instances
/// (full-support nominals, values uniform in [0, value_scale]).
OracleCheckReport run_oracle_check(const DivergenceSpec& spec, const OracleCheckOptions& options);

}  // namespace rrl
