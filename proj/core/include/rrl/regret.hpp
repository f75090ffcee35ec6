#pragma once

#include "rrl/dp.hpp"
#include "rrl/model.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace rrl {

/// Thrown when a policy evaluates above the robust optimum by more than numerical noise.
class RegretError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunRecord {
    /// V*_1(s1) - V^{pi_k}_1(s1) for each episode k.
    std::vector<double> per_episode_gap;
    std::vector<double> cumulative_regret;
    std::uint64_t seed = 0;
    nlohmann::json config;
    /// Wall-clock seconds per phase ("planning", "acting", "evaluation").
    std::map<std::string, double> timings;
};

/// Robust gaps of executed policies against the robust optimum, memoized by policy content.
class RegretEvaluator {
public:
    RegretEvaluator(const FiniteRMDP& env, const DualSolverConfig& cfg, bool memoize = true);

    double optimal_value() const { return optimal_value_; }
    const RobustSolution& optimum() const { return optimum_; }

    /// Gap of one policy; values in [-1e-9, 0) are clamped to 0, anything lower throws RegretError.
    double gap(const DeterministicPolicy& policy);

    std::size_t distinct_policies_evaluated() const { return evaluations_; }

private:
    const FiniteRMDP& env_;
    DualSolverConfig cfg_;
    bool memoize_;
    RobustSolution optimum_;
    double optimal_value_ = 0.0;
    std::size_t evaluations_ = 0;
    std::unordered_map<DeterministicPolicy, double, PolicyHash> cache_;
};

inline constexpr double kGapNoise = 1e-9;

RunRecord compute_regret(const FiniteRMDP& env, std::span<const DeterministicPolicy> policies,
                         const DualSolverConfig& cfg = {}, bool memoize = true);

/// Fills cumulative_regret as the running sum of per_episode_gap.
void accumulate_regret(RunRecord& record);

/// epsilon(K') = (1/K') sum_{k <= K'} gap_k on a log-spaced grid of K' that always includes
/// 1 and K. `points` bounds the grid size.
std::vector<std::pair<std::size_t, double>> sample_complexity_curve(const RunRecord& record,
                                                                    std::size_t points = 50);

/// Log-spaced distinct integers in [1, n], always including both ends.
std::vector<std::size_t> log_spaced_checkpoints(std::size_t n, std::size_t points);

struct AggregateRow {
    std::size_t episode = 0;
    double mean_regret = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    std::size_t n_seeds = 0;
};

/// Per-episode mean of cumulative regret across records with a normal 95% band
/// (mean +/- 1.96 sd / sqrt(n), sd with n - 1 degrees of freedom).
std::vector<AggregateRow> aggregate_runs(std::span<const RunRecord> records);

}  // namespace rrl
