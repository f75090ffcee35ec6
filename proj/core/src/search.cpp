#include "rrl/search.hpp"

#include "rrl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rrl {

void DualSolverConfig::validate() const {
    if (coarse_grid_points < 2) throw ModelError("coarse_grid_points must be at least 2");
    if (refine_iterations < 1) throw ModelError("refine_iterations must be positive");
    if (!(tolerance > 0.0)) throw ModelError("tolerance must be positive");
    if (!(eta_floor > 0.0)) throw ModelError("eta_floor must be positive");
}

ScalarMax maximize_unimodal_1d(const std::function<double(double)>& objective, double lo, double hi,
                               const DualSolverConfig& cfg, std::span<const double> extra_candidates) {
    if (!(lo <= hi)) throw std::invalid_argument("maximize_unimodal_1d: lo > hi");
    auto eval = [&objective](double x) {
        const double y = objective(x);
        if (!std::isfinite(y)) throw std::domain_error("maximize_unimodal_1d: non-finite objective");
        return y;
    };
    if (lo == hi) return {lo, eval(lo)};

    const std::size_t n = std::max<std::size_t>(cfg.coarse_grid_points, 2);
    std::vector<double> points;
    points.reserve(n + extra_candidates.size());
    for (std::size_t i = 0; i < n; ++i)
        points.push_back(i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    for (double x : extra_candidates)
        if (x > lo && x < hi) points.push_back(x);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    std::size_t best = 0;
    double best_value = eval(points[0]);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double y = eval(points[i]);
        if (y > best_value) {
            best_value = y;
            best = i;
        }
    }
    ScalarMax result{points[best], best_value};

    double left = points[best == 0 ? 0 : best - 1];
    double right = points[std::min(best + 1, points.size() - 1)];
    for (std::size_t it = 0; it < cfg.refine_iterations; ++it) {
        if (right - left <= 1e-15 * (1.0 + std::abs(left) + std::abs(right))) break;
        const double m1 = left + (right - left) / 3.0;
        const double m2 = right - (right - left) / 3.0;
        const double f1 = eval(m1);
        const double f2 = eval(m2);
        if (f1 > result.max) result = {m1, f1};
        if (f2 > result.max) result = {m2, f2};
        if (f1 < f2)
            left = m1;
        else
            right = m2;
    }
    return result;
}

}  // namespace rrl
