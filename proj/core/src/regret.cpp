#include "rrl/regret.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace rrl {

RegretEvaluator::RegretEvaluator(const FiniteRMDP& env, const DualSolverConfig& cfg, bool memoize)
    : env_(env), cfg_(cfg), memoize_(memoize), optimum_(robust_value_iteration(env, cfg)),
      optimal_value_(optimum_.values(0, env.initial_state())) {}

double RegretEvaluator::gap(const DeterministicPolicy& policy) {
    if (memoize_) {
        if (auto it = cache_.find(policy); it != cache_.end()) return it->second;
    }
    ++evaluations_;
    const auto values = robust_policy_evaluation(env_, policy, cfg_);
    double g = optimal_value_ - values(0, env_.initial_state());
    if (g < 0.0) {
        if (g < -kGapNoise) {
            std::ostringstream msg;
            msg << "policy value exceeds the robust optimum by " << -g;
            throw RegretError(msg.str());
        }
        g = 0.0;
    }
    if (memoize_) cache_.emplace(policy, g);
    return g;
}

void accumulate_regret(RunRecord& record) {
    record.cumulative_regret.resize(record.per_episode_gap.size());
    double total = 0.0;
    for (std::size_t k = 0; k < record.per_episode_gap.size(); ++k) {
        total += record.per_episode_gap[k];
        record.cumulative_regret[k] = total;
    }
}

RunRecord compute_regret(const FiniteRMDP& env, std::span<const DeterministicPolicy> policies,
                         const DualSolverConfig& cfg, bool memoize) {
    const auto t0 = std::chrono::steady_clock::now();
    RegretEvaluator evaluator(env, cfg, memoize);
    RunRecord record;
    record.per_episode_gap.reserve(policies.size());
    for (const auto& policy : policies) record.per_episode_gap.push_back(evaluator.gap(policy));
    accumulate_regret(record);
    record.timings["evaluation"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

std::vector<std::size_t> log_spaced_checkpoints(std::size_t n, std::size_t points) {
    std::vector<std::size_t> out;
    if (n == 0) return out;
    points = std::max<std::size_t>(points, 2);
    const double top = std::log(static_cast<double>(n));
    for (std::size_t i = 0; i < points; ++i) {
        const double x = std::exp(top * static_cast<double>(i) / static_cast<double>(points - 1));
        out.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(x)), 1, n));
    }
    out.front() = 1;
    out.back() = n;
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::pair<std::size_t, double>> sample_complexity_curve(const RunRecord& record, std::size_t points) {
    std::vector<std::pair<std::size_t, double>> curve;
    const auto& gaps = record.per_episode_gap;
    if (gaps.empty()) return curve;
    std::size_t next = 0;
    const auto checkpoints = log_spaced_checkpoints(gaps.size(), points);
    double running = 0.0;
    for (std::size_t k = 1; k <= gaps.size() && next < checkpoints.size(); ++k) {
        running += gaps[k - 1];
        if (k == checkpoints[next]) {
            curve.emplace_back(k, running / static_cast<double>(k));
            ++next;
        }
    }
    return curve;
}

std::vector<AggregateRow> aggregate_runs(std::span<const RunRecord> records) {
    std::vector<AggregateRow> rows;
    if (records.empty()) return rows;
    std::size_t episodes = records.front().cumulative_regret.size();
    for (const auto& r : records) episodes = std::min(episodes, r.cumulative_regret.size());
    const double n = static_cast<double>(records.size());
    rows.reserve(episodes);
    for (std::size_t k = 0; k < episodes; ++k) {
        double sum = 0.0;
        for (const auto& r : records) sum += r.cumulative_regret[k];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : records) {
            const double d = r.cumulative_regret[k] - mean;
            ss += d * d;
        }
        const double sd = records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        const double half = 1.96 * sd / std::sqrt(n);
        rows.push_back({k + 1, mean, mean - half, mean + half, records.size()});
    }
    return rows;
}

}  // namespace rrl
