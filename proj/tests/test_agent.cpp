#include "rrl/agent.hpp"
#include "rrl/baselines.hpp"
#include "rrl/dp.hpp"
#include "rrl/environments.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace rrl;

namespace {

using Vec = std::vector<double>;

AgentConfig unit_config(std::size_t episodes) {
    AgentConfig cfg;
    cfg.total_episodes = episodes;
    cfg.failure_prob = 0.1;
    return cfg;
}

VisitCounts counts_from(const FiniteRMDP& m, std::uint64_t per_row) {
    VisitCounts c(m.horizon(), m.num_states(), m.num_actions());
    for (std::size_t h = 0; h < m.horizon(); ++h)
        for (std::size_t s = 0; s < m.num_states(); ++s)
            for (std::size_t a = 0; a < m.num_actions(); ++a)
                for (std::size_t n = 0; n < m.num_states(); ++n) {
                    const auto k = static_cast<std::uint64_t>(std::llround(m.kernel(h, s, a, n) * per_row));
                    for (std::uint64_t i = 0; i < k; ++i) c.record(Transition{h, s, a, 0.0, n});
                }
    return c;
}

}  // namespace

TEST(Rng, DeterministicAndInRange) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(a.below(7), 7u);
        b.below(7);
    }
    EXPECT_NE(Rng::derive_seed(1, 1), Rng::derive_seed(1, 2));
    EXPECT_EQ(Rng::derive_seed(9, 3), Rng::derive_seed(9, 3));
}

TEST(Rng, CategoricalFrequencies) {
    Rng rng(1);
    const Vec w{0.2, 0.0, 0.8};
    std::vector<int> hits(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++hits[rng.categorical(w)];
    EXPECT_EQ(hits[1], 0);
    const double sd = std::sqrt(0.2 * 0.8 / n);
    EXPECT_NEAR(hits[0] / static_cast<double>(n), 0.2, 3 * sd);
}

TEST(EmpiricalKernel, RowsFromCounts) {
    VisitCounts c(1, 3, 1);
    EmpiricalKernel empty(c);
    EXPECT_FALSE(empty.visited(0, 0, 0));
    for (double p : empty.row(0, 0, 0)) EXPECT_EQ(p, 0.0);

    c.record(Transition{0, 0, 0, 0.0, 2});
    EXPECT_EQ(EmpiricalKernel(c).row(0, 0, 0)[2], 1.0);

    for (int i = 0; i < 2; ++i) c.record(Transition{0, 0, 0, 0.0, 2});
    c.record(Transition{0, 0, 0, 0.0, 1});
    const auto p = empirical_kernel(c);
    EXPECT_TRUE(p.visited(0, 0, 0));
    EXPECT_DOUBLE_EQ(p.row(0, 0, 0)[2], 0.75);
    EXPECT_DOUBLE_EQ(p.row(0, 0, 0)[1], 0.25);
}

TEST(LogFactor, Examples) {
    EXPECT_NEAR(log_factor(1, 1, 1, 1, std::exp(-1.0)), 1.0, 1e-12);
    EXPECT_NEAR(log_factor(2, 2, 2, 4, 0.1), std::log(5120.0), 1e-12);
    EXPECT_NEAR(std::log(5120.0), 8.5410, 1e-4);
    EXPECT_LT(log_factor(3, 2, 4, 10, 0.1), log_factor(3, 2, 4, 11, 0.1));
    EXPECT_THROW(log_factor(1, 1, 1, 1, 1.0), ModelError);
}

TEST(AgentConfig, Validation) {
    auto cfg = unit_config(0);
    EXPECT_THROW(cfg.validate(), ModelError);
    cfg = unit_config(5);
    cfg.failure_prob = 1.0;
    EXPECT_THROW(cfg.validate(), ModelError);
    cfg = unit_config(5);
    cfg.bonus_scale_c2 = -1.0;
    EXPECT_THROW(cfg.validate(), ModelError);
    cfg = unit_config(5);
    cfg.return_bound = 0.0;
    EXPECT_THROW(cfg.validate(), ModelError);
    EXPECT_EQ(parse_bonus_preset("theory"), BonusPreset::Theory);
    EXPECT_THROW(parse_bonus_preset("fast"), ModelError);
}

TEST(AgentConfig, PresetsAndCap) {
    const auto env = build_gambler(10, 10, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.3));
    const auto theory = AgentConfig::with_preset(BonusPreset::Theory, env, 100, 0.1, 0, 1.0);
    EXPECT_EQ(theory.bonus_scale_c1, 1.0);
    EXPECT_EQ(theory.bonus_scale_c2, 1.0);
    EXPECT_EQ(theory.value_cap(0, 10), 10.0);

    const auto practical = AgentConfig::with_preset(BonusPreset::Practical, env, 100, 0.1, 0, 1.0);
    EXPECT_EQ(practical.value_cap(0, 10), 1.0);
    EXPECT_EQ(practical.value_cap(9, 10), 1.0);
    // count term reduces to (R / H) sqrt(sigma / N)
    const auto params = BonusParameters::from(env, practical);
    Vec zeros(env.num_states(), 0.0), point = zeros;
    point[3] = 1.0;
    const double b = bonus_chi2(params, 16, point, zeros, zeros, 3);
    EXPECT_NEAR(b, 0.1 * std::sqrt(0.3 / 16) + std::sqrt(0.3 / 100), 1e-12);
}

TEST(BonusChi2, ZeroRadiusIsZero) {
    const FiniteRMDP m(2, 2, 2, DivergenceSpec(DivergenceKind::Chi2, 0.0));
    const auto params = BonusParameters::from(m, unit_config(4));
    EXPECT_EQ(bonus_chi2(params, 3, Vec{0.5, 0.5}, Vec{2.0, 0.0}, Vec{0.0, 0.0}, 0), 0.0);
}

TEST(BonusChi2, EqualEnvelopeLeavesCountAndHorizonTerms) {
    const FiniteRMDP m(2, 2, 2, DivergenceSpec(DivergenceKind::Chi2, 0.25));
    const auto params = BonusParameters::from(m, unit_config(4));
    const double L = std::log(5120.0);
    const double expected = 0.5 * 4 * 2 * (2 * L + 1) / std::sqrt(9.0) + std::sqrt(0.25 / 4);
    EXPECT_NEAR(bonus_chi2(params, 9, Vec{0.5, 0.5}, Vec{0.7, 0.7}, Vec{0.7, 0.7}, 0), expected, 1e-12);
}

TEST(BonusChi2, WorkedExample) {
    const FiniteRMDP m(2, 2, 2, DivergenceSpec(DivergenceKind::Chi2, 0.25));
    const auto params = BonusParameters::from(m, unit_config(4));
    const double sigma = 0.25, N = 4, H = 2, S = 2, K = 4;
    // hand substitution with L rounded to 8.541
    const double rounded = std::sqrt(0.25 * 8.541 * 0.25 / 4) + 0 + 1 * 0.5 * 4 * 2 * (2 * 8.541 + 1) / 2 + std::sqrt(0.25 / 4);
    EXPECT_NEAR(rounded, 36.77931236633873, 1e-12);
    // the same terms with the exact L: midpoint values (1,0) under (0.5,0.5) have variance 0.25
    const double L = std::log(std::pow(S, 3) * 2 * H * H * std::pow(K, 1.5) / 0.1);
    const double expected = std::sqrt(sigma * L * 0.25 / N) + 0.0 + std::sqrt(sigma) * H * H * S * (2 * L + 1) / std::sqrt(N) +
                            std::sqrt(sigma / K);
    EXPECT_NEAR(expected, rounded, 1e-3);
    EXPECT_NEAR(bonus_chi2(params, 4, Vec{0.5, 0.5}, Vec{1.0, 0.0}, Vec{1.0, 0.0}, 0), expected, 1e-12);
}

TEST(BonusChi2, UnvisitedRowUsesFallbackState) {
    const FiniteRMDP m(2, 2, 2, DivergenceSpec(DivergenceKind::Chi2, 0.25));
    const auto params = BonusParameters::from(m, unit_config(4));
    const double at_fallback = bonus_chi2(params, 0, Vec{0.0, 0.0}, Vec{3.0, 1.0}, Vec{1.0, 1.0}, 0);
    const double point_mass = bonus_chi2(params, 1, Vec{1.0, 0.0}, Vec{3.0, 1.0}, Vec{1.0, 1.0}, 0);
    EXPECT_DOUBLE_EQ(at_fallback, point_mass);
}

TEST(BonusKl, WorkedExampleAndScaling) {
    const FiniteRMDP m(2, 2, 2, DivergenceSpec(DivergenceKind::KL, 0.5));
    const auto params = BonusParameters::from(m, unit_config(4));
    const double L = std::log(5120.0);
    EXPECT_NEAR(bonus_kl(params, 4, Vec{0.75, 0.25}), (4 / 0.5) * std::sqrt(L / (4 * 0.25)) + 0.5, 1e-12);

    const double point = bonus_kl(params, 4, Vec{1.0, 0.0});
    EXPECT_NEAR(point, 2 * 2 * std::sqrt(L) / (0.5 * 2) + 0.5, 1e-12);
    const double half = bonus_kl(params, 4, Vec{0.5, 0.5});
    EXPECT_NEAR(half - 0.5, std::sqrt(2.0) * (point - 0.5), 1e-12);
    EXPECT_DOUBLE_EQ(bonus_kl(params, 0, Vec{0.0, 0.0}), bonus_kl(params, 1, Vec{1.0, 0.0}));

    const FiniteRMDP flat(2, 2, 2, DivergenceSpec(DivergenceKind::KL, 0.0));
    EXPECT_THROW(bonus_kl(BonusParameters::from(flat, unit_config(4)), 4, Vec{0.5, 0.5}), ModelError);
}

TEST(Planning, FirstEpisodeIsCappedAndLowestIndex) {
    const auto env = build_gambler(6, 5, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.3));
    const VisitCounts none(5, env.num_states(), env.num_actions());
    const auto st = optimistic_planning(EmpiricalKernel(none), none, unit_config(10), env);
    for (std::size_t h = 0; h < 5; ++h)
        for (std::size_t s = 0; s < env.num_states(); ++s) {
            EXPECT_EQ(st.policy(h, s), env.first_legal_action(h, s));
            EXPECT_EQ(st.upper_v(h, s), static_cast<double>(5 - h));
            EXPECT_EQ(st.lower_v(h, s), 0.0);
        }
}

TEST(Planning, ZeroRadiusExactCountsReproduceNominalQ) {
    Rng rng(4);
    const auto m = test::random_model(2, 2, 3, DivergenceSpec(DivergenceKind::Chi2, 0.0), rng);
    auto exact = m;
    // counts of 1000 per row reproduce kernels rounded to 1e-3
    for (std::size_t h = 0; h < 3; ++h)
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t a = 0; a < 2; ++a) {
                const double p0 = std::round(m.kernel(h, s, a, 0) * 1000) / 1000;
                exact.kernel(h, s, a, 0) = p0;
                exact.kernel(h, s, a, 1) = 1.0 - p0;
            }
    const auto counts = counts_from(exact, 1000);
    const auto st = optimistic_planning(EmpiricalKernel(counts), counts, unit_config(10), exact);
    const auto truth = nominal_value_iteration(exact);
    for (std::size_t h = 0; h < 3; ++h)
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t a = 0; a < 2; ++a) {
                EXPECT_NEAR(st.upper_q(h, s, a), truth.q_values(h, s, a), 1e-9);
                EXPECT_NEAR(st.lower_q(h, s, a), truth.q_values(h, s, a), 1e-9);
            }
}

TEST(Planning, EnvelopeOrderedAndClipped) {
    const auto env = build_gambler(8, 6, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.3));
    const auto cfg = AgentConfig::with_preset(BonusPreset::Practical, env, 60, 0.1, 3);
    rvi_run(env, cfg, [&](std::size_t, const ConfidenceState& st, const EpisodeTrajectory&) {
        for (std::size_t h = 0; h < 6; ++h)
            for (std::size_t s = 0; s < env.num_states(); ++s) {
                EXPECT_LE(st.lower_v(h, s), st.upper_v(h, s));
                EXPECT_GE(st.lower_v(h, s), 0.0);
                EXPECT_LE(st.upper_v(h, s), static_cast<double>(6 - h));
                for (std::size_t a = 0; a < env.num_actions(); ++a)
                    if (env.legal(h, s, a)) EXPECT_LE(st.lower_q(h, s, a), st.upper_q(h, s, a));
            }
    });
}

TEST(Planning, RejectsTvUncertainty) {
    const auto env = build_gambler(4, 3, 0.6, DivergenceSpec(DivergenceKind::TV, 0.3));
    EXPECT_THROW(rvi_run(env, unit_config(2)), ModelError);
    const auto kl0 = build_gambler(4, 3, 0.6, DivergenceSpec(DivergenceKind::KL, 0.0));
    EXPECT_THROW(rvi_run(kl0, unit_config(2)), ModelError);
}

TEST(Episode, DeterministicChainFollowsUniquePath) {
    const auto m = test::deterministic_chain(4);
    Rng rng(0);
    const auto t = run_episode(m, DeterministicPolicy(4, 2, 1), rng);
    ASSERT_EQ(t.steps.size(), 4u);
    EXPECT_TRUE(t.chained());
    EXPECT_EQ(t.steps[0].state, 0u);
    for (std::size_t h = 1; h < 4; ++h) EXPECT_EQ(t.steps[h].state, 1u);
    EXPECT_DOUBLE_EQ(t.total_reward(), 1.0);
}

TEST(Episode, SameSeedSameTrajectory) {
    const auto env = build_frozen_lake(canonical_lake_4x4(), 12, DivergenceSpec(DivergenceKind::KL, 0.1));
    const DeterministicPolicy pi(12, env.num_states(), kDown);
    Rng a(77), b(77);
    for (int i = 0; i < 20; ++i) {
        const auto ta = run_episode(env, pi, a), tb = run_episode(env, pi, b);
        ASSERT_EQ(ta.steps.size(), tb.steps.size());
        for (std::size_t h = 0; h < ta.steps.size(); ++h) EXPECT_EQ(ta.steps[h].next_state, tb.steps[h].next_state);
    }
}

TEST(Episode, NextStateFrequenciesMatchKernel) {
    auto env = build_gambler(10, 1, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.0), 4);
    DeterministicPolicy pi(1, env.num_states());
    pi(0, 4) = 3;
    Rng rng(2024);
    const int n = 100000;
    int up = 0;
    for (int i = 0; i < n; ++i) up += run_episode(env, pi, rng).steps[0].next_state == 7 ? 1 : 0;
    EXPECT_NEAR(up / static_cast<double>(n), 0.6, 3 * std::sqrt(0.24 / n));
}

TEST(Episode, RejectsIllegalAction) {
    const auto env = build_gambler(4, 2, 0.6, DivergenceSpec{});
    DeterministicPolicy pi(2, env.num_states(), 2);
    Rng rng(0);
    EXPECT_THROW(run_episode(env, pi, rng), ModelError);
}

TEST(OutputPolicy, UniformChoice) {
    std::vector<DeterministicPolicy> one{DeterministicPolicy(1, 1, 0)};
    Rng rng(5);
    EXPECT_EQ(output_policy(one, rng), one[0]);
    EXPECT_THROW(output_policy(std::span<const DeterministicPolicy>{}, rng), ModelError);

    std::vector<DeterministicPolicy> four;
    for (std::size_t i = 0; i < 4; ++i) four.emplace_back(1, 1, i);
    Rng r1(8), r2(8);
    EXPECT_EQ(output_policy(four, r1), output_policy(four, r2));
    std::vector<int> hits(4, 0);
    for (int i = 0; i < 10000; ++i) ++hits[output_policy(four, rng)(0, 0)];
    for (int h : hits) EXPECT_NEAR(h / 10000.0, 0.25, 0.02);
}

TEST(RviRun, SingleEpisodeAndConservation) {
    const auto env = build_gambler(6, 4, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.3));
    const auto one = rvi_run(env, unit_config(1));
    ASSERT_EQ(one.policies.size(), 1u);
    for (std::size_t h = 0; h < 4; ++h)
        for (std::size_t s = 0; s < env.num_states(); ++s)
            EXPECT_EQ(one.policies[0](h, s), env.first_legal_action(h, s));

    const auto run = rvi_run(env, unit_config(25));
    EXPECT_EQ(run.policies.size(), 25u);
    EXPECT_EQ(run.counts.total_transitions(), 25u * 4u);
    EXPECT_TRUE(run.counts.consistent());
}

TEST(RviRun, SeedDeterminism) {
    const auto env = build_frozen_lake(canonical_lake_4x4(), 8, DivergenceSpec(DivergenceKind::KL, 0.1));
    auto cfg = AgentConfig::with_preset(BonusPreset::Practical, env, 40, 0.1, 17, 1.0);
    const auto a = rvi_run(env, cfg), b = rvi_run(env, cfg);
    EXPECT_EQ(a.policies, b.policies);
    cfg.rng_seed = 18;
    const auto c = rvi_run(env, cfg);
    EXPECT_EQ(c.policies.size(), 40u);
}

TEST(UcbVi, IgnoresRadius) {
    const auto a = build_gambler(6, 5, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.1));
    const auto b = build_gambler(6, 5, 0.6, DivergenceSpec(DivergenceKind::KL, 0.9));
    const auto cfg = AgentConfig::with_preset(BonusPreset::Practical, a, 30, 0.1, 2, 1.0);
    EXPECT_EQ(ucbvi_run(a, cfg).policies, ucbvi_run(b, cfg).policies);
}

TEST(UcbVi, DeterministicKernelConvergesToOptimum) {
    const auto m = test::deterministic_chain(3);
    auto cfg = unit_config(12);
    cfg.hoeffding_scale = 0.0;
    const auto truth = nominal_value_iteration(m);
    ConfidenceState last;
    ucbvi_run(m, cfg, [&](std::size_t, const ConfidenceState& st, const EpisodeTrajectory&) { last = st; });
    EXPECT_EQ(last.policy(0, 0), truth.policy(0, 0));
    EXPECT_NEAR(last.upper_v(0, 0), truth.values(0, 0), 1e-12);
    for (std::size_t h = 1; h < 3; ++h)
        for (std::size_t a = 0; a < 2; ++a) EXPECT_NEAR(last.upper_q(h, 1, a), truth.q_values(h, 1, a), 1e-12);
}
