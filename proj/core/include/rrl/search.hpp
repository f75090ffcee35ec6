#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace rrl {

/// Settings for the scalar dual-variable search.
struct DualSolverConfig {
    std::size_t coarse_grid_points = 64;
    std::size_t refine_iterations = 60;
    /// Lower end of the KL dual domain.
    double eta_floor = 1e-6;
    double tolerance = 1e-9;

    /// Throws ModelError on grid < 2, nonpositive tolerance or eta_floor.
    void validate() const;
};

struct ScalarMax {
    double argmax = 0.0;
    double max = 0.0;
};

/**
 * Maximizes a scalar objective on [lo, hi]: evaluates an evenly spaced grid of
 * cfg.coarse_grid_points points (plus any extra candidates inside the interval),
 * then runs ternary search between the neighbours of the best point.
 *
 * For unimodal objectives the result is within cfg.tolerance of the true maximum;
 * otherwise it is at least the best grid evaluation. Throws std::domain_error if
 * the objective returns a non-finite value.
 */
ScalarMax maximize_unimodal_1d(const std::function<double(double)>& objective, double lo, double hi,
                               const DualSolverConfig& cfg, std::span<const double> extra_candidates = {});

}  // namespace rrl
