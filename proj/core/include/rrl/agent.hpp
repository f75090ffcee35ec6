#pragma once

#include "rrl/dual.hpp"
#include "rrl/model.hpp"
#include "rrl/random.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace rrl {

/// Bonus constants: the theory preset uses c1 = c2 = cf = 1; the practical preset
/// rescales them so bonuses shrink below the value range within a desk-scale run.
enum class BonusPreset { Theory, Practical };

BonusPreset parse_bonus_preset(std::string_view name);
std::string_view to_string(BonusPreset preset);

struct AgentConfig {
    std::size_t total_episodes = 1;
    double failure_prob = 0.1;
    double bonus_scale_c1 = 1.0;
    double bonus_scale_c2 = 1.0;
    double bonus_scale_cf = 1.0;
    /// Scale c of the UCB-VI baseline's Hoeffding bonus c H sqrt(L / (N v 1)).
    double hoeffding_scale = 1.0;
    /// Known bound on an episode's total reward; optimistic values are clipped at min(H - h, return_bound).
    double return_bound = std::numeric_limits<double>::infinity();
    DualSolverConfig dual_cfg;
    std::uint64_t rng_seed = 0;

    void validate() const;

    /// Clip level for step h (0-based) of a horizon-H model.
    double value_cap(std::size_t h, std::size_t horizon) const;

    /// The practical preset scales every count-driven bonus term to the per-step return
    /// share R / H with R = min(H, return_bound), and keeps `return_bound` for clipping.
    /// The theory preset ignores `return_bound`.
    static AgentConfig with_preset(BonusPreset preset, const FiniteRMDP& model, std::size_t episodes,
                                   double failure_prob, std::uint64_t seed,
                                   double return_bound = std::numeric_limits<double>::infinity());
};

/// Row-normalized counts; rows never visited are all-zero and flagged.
class EmpiricalKernel {
public:
    explicit EmpiricalKernel(const VisitCounts& counts);

    std::span<const double> row(std::size_t h, std::size_t s, std::size_t a) const {
        return {probs_.data() + ((h * states_ + s) * actions_ + a) * states_, states_};
    }
    bool visited(std::size_t h, std::size_t s, std::size_t a) const {
        return visited_[(h * states_ + s) * actions_ + a] != 0;
    }

private:
    std::size_t states_;
    std::size_t actions_;
    std::vector<double> probs_;
    std::vector<std::uint8_t> visited_;
};

EmpiricalKernel empirical_kernel(const VisitCounts& counts);

/// L = log(S^3 A H^2 K^{3/2} / delta).
double log_factor(std::size_t S, std::size_t A, std::size_t H, std::size_t K, double delta);

/// Quantities shared by every bonus evaluation within one run.
struct BonusParameters {
    std::size_t num_states = 1;
    std::size_t horizon = 1;
    std::size_t episodes = 1;
    double sigma = 0.0;
    double log_term = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double cf = 1.0;

    static BonusParameters from(const FiniteRMDP& model, const AgentConfig& cfg);
};

/**
 * Chi-square bonus
 *   sqrt(sigma c1 L Var_P[(Vu + Vl)/2] / (N v 1)) + 2 sqrt(sigma) E_P[Vu - Vl] / H
 *   + c2 sqrt(sigma) H^2 S (2L + 1) / sqrt(N v 1) + sqrt(sigma / K).
 * An all-zero `p_hat` row is read as a point mass on `fallback_state`.
 */
double bonus_chi2(const BonusParameters& params, std::uint64_t visits, std::span<const double> p_hat,
                  std::span<const double> upper_next, std::span<const double> lower_next,
                  std::size_t fallback_state);

/// KL bonus (2 cf H / sigma) sqrt(L / ((N v 1) Pmin)) + sqrt(1/K), Pmin the smallest positive
/// entry of `p_hat` (1 for an unvisited row). Requires sigma > 0.
double bonus_kl(const BonusParameters& params, std::uint64_t visits, std::span<const double> p_hat);

/// Optimistic and pessimistic robust Q/V estimates plus the greedy policy for one episode.
struct ConfidenceState {
    QTable upper_q;
    QTable lower_q;
    ValueTable upper_v;
    ValueTable lower_v;
    DeterministicPolicy policy;
};

/**
 * Backward induction on the empirical kernel:
 *   Qu = min(r + E_U[Vu_{h+1}] + B, cap_h),  Ql = max(r + E_U[Vl_{h+1}] - B, 0)
 * with cap_h = cfg.value_cap(h, H) and B the bonus matching the model's divergence (Chi2 or KL).
 * Unvisited rows get Qu = cap_h and Ql = 0 without consulting the dual.
 */
ConfidenceState optimistic_planning(const EmpiricalKernel& p_hat, const VisitCounts& counts,
                                    const AgentConfig& cfg, const FiniteRMDP& model);

/// Rolls the policy out for exactly H steps on the model's nominal kernel.
EpisodeTrajectory run_episode(const FiniteRMDP& env, const DeterministicPolicy& policy, Rng& rng);

/// Uniformly chosen element of a nonempty policy sequence.
const DeterministicPolicy& output_policy(std::span<const DeterministicPolicy> policies, Rng& rng);

struct OnlineRun {
    std::vector<DeterministicPolicy> policies;
    VisitCounts counts;
    double planning_seconds = 0.0;
    double acting_seconds = 0.0;
};

/// Called after every episode with its 0-based index, the planner state, and the trajectory.
using EpisodeObserver =
    std::function<void(std::size_t episode, const ConfidenceState& state, const EpisodeTrajectory& trajectory)>;

/// Plans from the current counts and returns the state whose policy is executed next.
using Planner = std::function<ConfidenceState(const EmpiricalKernel&, const VisitCounts&)>;

/// Generic estimate / plan / act / count loop over cfg.total_episodes episodes.
OnlineRun run_online(const FiniteRMDP& env, const AgentConfig& cfg, const Planner& planner,
                     const EpisodeObserver& observer = {});

/// RVI with chi-square or KL bonuses (the kind is taken from env.uncertainty()).
OnlineRun rvi_run(const FiniteRMDP& env, const AgentConfig& cfg, const EpisodeObserver& observer = {});

}  // namespace rrl
