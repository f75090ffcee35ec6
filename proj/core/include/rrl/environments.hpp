#pragma once

#include "rrl/model.hpp"
#include "rrl/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rrl {

/**
 * Gambler's problem with target `target`: states 0..target hold the capital and
 * state target+1 is an absorbing sink. Action a stakes a (legal when
 * a <= min(s, target - s)); heads with probability p_head wins the stake.
 * The target state pays reward 1 on its single legal action and moves to the sink,
 * so the reward is collected exactly once. Capital 0 and the sink are absorbing.
 * The initial state defaults to target / 2.
 */
FiniteRMDP build_gambler(std::size_t target, std::size_t horizon, double p_head, DivergenceSpec spec,
                         std::size_t initial_capital = static_cast<std::size_t>(-1));

/// Frozen Lake action indices (Gym order).
enum LakeAction : std::size_t { kLeft = 0, kDown = 1, kRight = 2, kUp = 3 };

using LakeLayout = std::vector<std::string>;

/// "SFFF", "FHFH", "FFFH", "HFFG".
LakeLayout canonical_lake_4x4();

/// Random square layout: each interior cell is a hole with probability
/// `hole_prob`; redrawn until a start-to-goal path exists. Start top-left, goal bottom-right.
LakeLayout random_lake_layout(std::size_t side, std::uint64_t layout_seed, double hole_prob = 0.2);

/// True when G is reachable from S through non-hole cells (4-neighbourhood).
bool lake_connected(const LakeLayout& layout);

/**
 * Slippery Frozen Lake: cells in row-major order plus one absorbing sink (last index).
 * Each move goes in the intended direction or either perpendicular one with probability
 * 1/3 each; moves into a wall stay put. Holes and the goal move to the sink; the goal
 * pays reward 1 when left, everything else pays 0.
 */
FiniteRMDP build_frozen_lake(const LakeLayout& layout, std::size_t horizon, DivergenceSpec spec);

/// Convenience overload: the canonical layout for side 4, a seeded random layout otherwise.
FiniteRMDP build_frozen_lake(std::size_t side, std::size_t horizon, DivergenceSpec spec,
                             std::uint64_t layout_seed = 0);

/// Three-state instance family used for regret lower bounds.
struct HardInstanceSpec {
    std::size_t num_actions = 2;
    double branch_prob = 0.5;
    std::size_t horizon = 2;
    /// Action whose mean at s2 is boosted; 0 selects the base instance (no boost).
    std::size_t special_action_index = 0;
    double base_mean = 0.0;
    /// Multiplier applied to base_mean for the special action (the family size's square root).
    double boost = 1.0;
    DivergenceSpec divergence{DivergenceKind::Chi2, 0.0};

    void validate() const;
};

struct HardInstance {
    FiniteRMDP model;
    /// Mean reward of each action at s2.
    std::vector<double> action_means;

    /// Gaussian reward draw with unit variance at state s2; deterministic elsewhere.
    double sample_reward(std::size_t state, std::size_t action, Rng& rng) const;
};

inline constexpr std::size_t kHardS1 = 0, kHardS2 = 1, kHardS3 = 2;

/// s1 branches to s2 with probability p and to s3 otherwise at the first step;
/// s2 and s3 are absorbing afterwards. s2 pays the action mean, s3 pays 1, s1 pays 0.
HardInstance build_hard_instance(const HardInstanceSpec& spec);

/// Largest p' with D_f((p', 1 - p') || (p, 1 - p)) <= sigma, clipped at 1.
double hard_instance_worst_branch(DivergenceSpec spec, double p);

struct KlLowerBoundTuning {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
    bool feasible = false;
};

/// With alpha = 1 - p and beta = log(1/alpha)/2, reports the admissible KL radius
/// interval [(1 - 3/beta) log(1/alpha), (1 - 2/beta) log(1/alpha)] and whether sigma lies in it.
KlLowerBoundTuning kl_lower_bound_tuning(double p, double sigma);

}  // namespace rrl
