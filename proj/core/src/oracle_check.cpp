#include "rrl/oracle_check.hpp"

#include "rrl/random.hpp"

#include <algorithm>
#include <cmath>

namespace rrl {

double oracle_tolerance(std::span<const double> values, double resolution) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return 1e-3 * (*hi - *lo) + oracle_value_slack(values, resolution);
}

OracleCheckReport run_oracle_check(const DivergenceSpec& spec, const OracleCheckOptions& options) {
    Rng rng(Rng::derive_seed(options.seed, static_cast<std::uint64_t>(spec.kind)));
    OracleCheckReport report;
    std::vector<double> nominal(options.support), values(options.support);
    for (std::size_t i = 0; i < options.instances; ++i) {
        double total = 0.0;
        for (auto& p : nominal) {
            p = -std::log(1.0 - rng.uniform());
            total += p;
        }
        const double floor = 0.1 / static_cast<double>(options.support);
        for (auto& p : nominal) p = 0.9 * p / total + floor;
        for (auto& v : values) v = options.value_scale * rng.uniform();

        const double dual = robust_expectation(spec, nominal, values, options.dual_cfg);
        const double oracle = worst_case_oracle(nominal, values, spec, options.resolution).value;
        const double err = std::abs(dual - oracle);
        const double ratio = err / oracle_tolerance(values, options.resolution);
        ++report.instances;
        if (ratio > 1.0) ++report.failures;
        report.worst_ratio = std::max(report.worst_ratio, ratio);
        report.worst_abs_error = std::max(report.worst_abs_error, err);
    }
    return report;
}

}  // namespace rrl
