#pragma once

#include "rrl/model.hpp"
#include "rrl/search.hpp"

#include <span>
#include <vector>

namespace rrl {

/**
 * D_f(p, q) = sum_s f(p(s)/q(s)) q(s).
 *
 * Terms with q(s) = p(s) = 0 contribute nothing; q(s) = 0 < p(s) makes the
 * result +inf for Chi2 and KL. For TV this is the L1 distance sum |p - q|.
 */
double f_divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind);

/// inf over the TV ball of E_P[V]; exact scan of the piecewise-linear dual.
double robust_expectation_tv(std::span<const double> nominal, std::span<const double> values, double sigma);

/// inf over the chi-square ball of E_P[V] via the scalar dual in the clipping level.
double robust_expectation_chi2(std::span<const double> nominal, std::span<const double> values, double sigma,
                               const DualSolverConfig& cfg = {});

/// inf over the KL ball of E_P[V] via the scalar dual in the temperature.
double robust_expectation_kl(std::span<const double> nominal, std::span<const double> values, double sigma,
                             const DualSolverConfig& cfg = {});

/// Dispatches on spec.kind.
double robust_expectation(const DivergenceSpec& spec, std::span<const double> nominal,
                          std::span<const double> values, const DualSolverConfig& cfg = {});

/// The chi-square dual objective E[min(V,eta)] - sqrt(sigma Var(min(V,eta))) under `nominal`.
double chi2_dual_objective(std::span<const double> nominal, std::span<const double> values, double sigma,
                           double eta);

/// The KL dual objective -eta log E[exp(-V/eta)] - eta sigma under `nominal`, evaluated stably.
double kl_dual_objective(std::span<const double> nominal, std::span<const double> values, double sigma,
                         double eta);

struct WorstCase {
    double value = 0.0;
    std::vector<double> argmin;
};

/**
 * Brute-force primal worst case for small problems, meant as a test oracle.
 *
 * Enumerates the simplex on a grid with step `resolution` over the nominal's support
 * (Chi2, KL) or over all coordinates (TV), keeps points with D_f <= sigma + resolution * min(1, sigma),
 * and returns the lowest expectation. At most 4 free coordinates; resolution <= 1e-3.
 */
WorstCase worst_case_oracle(std::span<const double> nominal, std::span<const double> values,
                            const DivergenceSpec& spec, double resolution);

/// Allowed |dual - oracle| discrepancy attributable to the oracle grid and its divergence slack.
double oracle_value_slack(std::span<const double> values, double resolution);

}  // namespace rrl
