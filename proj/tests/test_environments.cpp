#include "rrl/dp.hpp"
#include "rrl/environments.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rrl;

TEST(Gambler, Structure) {
    const auto m = build_gambler(20, 5, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.3));
    EXPECT_EQ(m.num_states(), 22u);
    EXPECT_EQ(m.num_actions(), 11u);
    EXPECT_EQ(m.initial_state(), 10u);
    EXPECT_TRUE(validate_rmdp(m).ok());

    EXPECT_EQ(m.kernel(0, 7, 0, 7), 1.0);
    EXPECT_DOUBLE_EQ(m.kernel(2, 1, 1, 2), 0.6);
    EXPECT_DOUBLE_EQ(m.kernel(2, 1, 1, 0), 0.4);
    EXPECT_FALSE(m.legal(0, 1, 2));
    EXPECT_TRUE(m.legal(0, 10, 10));
    EXPECT_FALSE(m.legal(0, 15, 6));

    EXPECT_EQ(m.reward(0, 20, 0), 1.0);
    EXPECT_EQ(m.kernel(0, 20, 0, 21), 1.0);
    EXPECT_FALSE(m.legal(0, 20, 1));
    EXPECT_EQ(m.kernel(0, 21, 0, 21), 1.0);
    EXPECT_EQ(m.kernel(0, 0, 0, 0), 1.0);
    for (std::size_t s = 0; s < 20; ++s)
        for (std::size_t a = 0; a < 11; ++a)
            if (m.legal(0, s, a)) EXPECT_EQ(m.reward(0, s, a), 0.0);
}

TEST(Gambler, BrokeAndSinkAreWorthless) {
    const auto m = build_gambler(8, 6, 0.6, DivergenceSpec(DivergenceKind::KL, 0.2));
    const auto sol = robust_value_iteration(m);
    EXPECT_EQ(sol.values(0, 0), 0.0);
    EXPECT_EQ(sol.values(0, 9), 0.0);
    EXPECT_EQ(sol.values(0, 8), 1.0);
    for (std::size_t s = 1; s < 8; ++s) {
        EXPECT_GT(sol.values(0, s), 0.0);
        EXPECT_LT(sol.values(0, s), 1.0);
    }
}

TEST(Gambler, RejectsBadParameters) {
    EXPECT_THROW(build_gambler(1, 5, 0.6, {}), ModelError);
    EXPECT_THROW(build_gambler(10, 5, 1.0, {}), ModelError);
    EXPECT_THROW(build_gambler(10, 5, 0.6, {}, 11), ModelError);
}

TEST(FrozenLake, Structure) {
    const auto m = build_frozen_lake(4, 10, DivergenceSpec(DivergenceKind::KL, 0.1));
    EXPECT_EQ(m.num_states(), 17u);
    EXPECT_EQ(m.num_actions(), 4u);
    EXPECT_EQ(m.initial_state(), 0u);
    EXPECT_TRUE(validate_rmdp(m).ok());

    // top-left corner, moving left: left and up hit walls, down slips to cell 4
    EXPECT_NEAR(m.kernel(0, 0, kLeft, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.kernel(0, 0, kLeft, 4), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.kernel(0, 6, kRight, 7), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.kernel(0, 6, kRight, 2), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.kernel(0, 6, kRight, 10), 1.0 / 3.0, 1e-15);

    for (std::size_t s = 0; s < 16; ++s)
        for (std::size_t a = 0; a < 4; ++a) {
            int successors = 0;
            for (std::size_t n = 0; n < 17; ++n) successors += m.kernel(0, s, a, n) > 0.0;
            EXPECT_LE(successors, 3);
        }
    EXPECT_EQ(m.kernel(0, 5, kUp, 16), 1.0);
    EXPECT_EQ(m.reward(0, 5, kUp), 0.0);
    EXPECT_EQ(m.kernel(0, 15, kDown, 16), 1.0);
    EXPECT_EQ(m.reward(0, 15, kDown), 1.0);
    EXPECT_EQ(m.kernel(3, 16, kLeft, 16), 1.0);
}

TEST(FrozenLake, RandomLayoutsAreConnected) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto layout = random_lake_layout(6, seed, 0.3);
        EXPECT_TRUE(lake_connected(layout));
        EXPECT_EQ(layout.front().front(), 'S');
        EXPECT_EQ(layout.back().back(), 'G');
        EXPECT_EQ(layout, random_lake_layout(6, seed, 0.3));
    }
    EXPECT_FALSE(lake_connected({"SH", "HG"}));
    EXPECT_THROW(build_frozen_lake(LakeLayout{"SH", "HG"}, 4, {}), ModelError);
    EXPECT_THROW(build_frozen_lake(LakeLayout{"SF", "FX"}, 4, {}), ModelError);
}

TEST(HardInstance, WorstBranchClosedForms) {
    EXPECT_NEAR(hard_instance_worst_branch(DivergenceSpec(DivergenceKind::TV, 0.2), 0.5), 0.6, 1e-15);
    EXPECT_EQ(hard_instance_worst_branch(DivergenceSpec(DivergenceKind::TV, 2.0), 0.5), 1.0);
    EXPECT_NEAR(hard_instance_worst_branch(DivergenceSpec(DivergenceKind::Chi2, 0.5), 0.5), 0.853553, 1e-6);

    const double q = hard_instance_worst_branch(DivergenceSpec(DivergenceKind::KL, 0.1), 0.3);
    const double kl = q * std::log(q / 0.3) + (1 - q) * std::log((1 - q) / 0.7);
    EXPECT_NEAR(kl, 0.1, 1e-9);
    EXPECT_GT(q, 0.3);
    // KL((1,0)||(p,1-p)) = log(1/p)
    EXPECT_EQ(hard_instance_worst_branch(DivergenceSpec(DivergenceKind::KL, std::log(1 / 0.3) + 1e-9), 0.3), 1.0);
    EXPECT_THROW(hard_instance_worst_branch({}, 1.0), ModelError);
}

// TV balls also reach states outside the nominal support (here s1), so the
// two-branch formula is exact only for chi-square and KL and an upper bound for TV.
TEST(HardInstance, RobustValueFormula) {
    for (auto kind : {DivergenceKind::TV, DivergenceKind::Chi2, DivergenceKind::KL}) {
        HardInstanceSpec spec;
        spec.num_actions = 3;
        spec.branch_prob = 0.4;
        spec.horizon = 7;
        spec.special_action_index = 2;
        spec.base_mean = 0.2;
        spec.boost = 2.0;
        spec.divergence = DivergenceSpec(kind, 0.3);
        const auto inst = build_hard_instance(spec);
        EXPECT_EQ(inst.action_means, (std::vector<double>{0.2, 0.0, 0.4}));
        const auto sol = robust_value_iteration(inst.model);
        const double p = hard_instance_worst_branch(spec.divergence, 0.4);
        const double formula = p * 6 * 0.4 + (1 - p) * 6;
        if (kind == DivergenceKind::TV)
            EXPECT_LT(sol.values(0, kHardS1), formula);
        else
            EXPECT_NEAR(sol.values(0, kHardS1), formula, 1e-6);
        EXPECT_EQ(sol.policy(1, kHardS2), 2u);
    }
}

TEST(HardInstance, ZeroMeanMakesEveryPolicyOptimal) {
    HardInstanceSpec spec;
    spec.num_actions = 4;
    spec.horizon = 5;
    spec.divergence = DivergenceSpec(DivergenceKind::Chi2, 0.2);
    const auto inst = build_hard_instance(spec);
    const auto opt = robust_value_iteration(inst.model).values(0, kHardS1);
    DeterministicPolicy pi(5, 3, 3);
    EXPECT_NEAR(robust_policy_evaluation(inst.model, pi)(0, kHardS1), opt, 1e-12);
}

TEST(HardInstance, RewardsAndValidation) {
    HardInstanceSpec spec;
    spec.base_mean = 0.3;
    const auto inst = build_hard_instance(spec);
    Rng rng(4);
    EXPECT_EQ(inst.sample_reward(kHardS3, 0, rng), 1.0);
    EXPECT_EQ(inst.sample_reward(kHardS1, 1, rng), 0.0);
    double total = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) total += inst.sample_reward(kHardS2, 0, rng);
    EXPECT_NEAR(total / n, 0.3, 4.0 / std::sqrt(n));

    spec.special_action_index = 1;
    spec.boost = 4.0;
    EXPECT_THROW(build_hard_instance(spec), ModelError);
    spec.special_action_index = 5;
    EXPECT_THROW(build_hard_instance(spec), ModelError);
}

TEST(HardInstance, KlTuningInterval) {
    // 1 - e^-20 rounds in double, so log(1/alpha) is 20 only to about 1e-8
    const double p = 1.0 - std::exp(-20.0);
    const auto t = kl_lower_bound_tuning(p, 15.0);
    EXPECT_NEAR(t.alpha, std::exp(-20.0), 1e-15);
    EXPECT_NEAR(t.beta, 10.0, 1e-6);
    EXPECT_NEAR(t.sigma_lo, 14.0, 1e-6);
    EXPECT_NEAR(t.sigma_hi, 16.0, 1e-6);
    EXPECT_TRUE(t.feasible);
    EXPECT_FALSE(kl_lower_bound_tuning(p, 17.0).feasible);
    EXPECT_FALSE(kl_lower_bound_tuning(0.5, 0.1).feasible);
}
