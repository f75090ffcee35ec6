#include "rrl/agent.hpp"
#include "rrl/dp.hpp"
#include "rrl/dual.hpp"
#include "rrl/environments.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace rrl;

namespace {

struct Instance {
    std::vector<double> nominal, values;
};

Instance random_instance(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Instance inst{std::vector<double>(n), std::vector<double>(n)};
    double total = 0.0;
    for (auto& p : inst.nominal) total += (p = 0.05 + rng.uniform());
    for (auto& p : inst.nominal) p /= total;
    for (auto& v : inst.values) v = 20.0 * rng.uniform();
    return inst;
}

void BM_DualTv(benchmark::State& state) {
    const auto inst = random_instance(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(robust_expectation_tv(inst.nominal, inst.values, 0.3));
}

void BM_DualChi2(benchmark::State& state) {
    const auto inst = random_instance(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(robust_expectation_chi2(inst.nominal, inst.values, 0.3));
}

void BM_DualKl(benchmark::State& state) {
    const auto inst = random_instance(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(robust_expectation_kl(inst.nominal, inst.values, 0.3));
}

void BM_RobustValueIterationGambler(benchmark::State& state) {
    const auto env = build_gambler(20, 20, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.3));
    for (auto _ : state) benchmark::DoNotOptimize(robust_value_iteration(env).values(0, env.initial_state()));
}

void BM_OptimisticPlanningGambler(benchmark::State& state) {
    const auto env = build_gambler(20, 20, 0.6, DivergenceSpec(DivergenceKind::Chi2, 0.3));
    const auto cfg = AgentConfig::with_preset(BonusPreset::Practical, env, 2000, 0.1, 0, 1.0);
    auto run = rvi_run(env, [&] {
        auto c = cfg;
        c.total_episodes = static_cast<std::size_t>(state.range(0));
        return c;
    }());
    const EmpiricalKernel p_hat(run.counts);
    for (auto _ : state) benchmark::DoNotOptimize(optimistic_planning(p_hat, run.counts, cfg, env).policy);
}

}  // namespace

BENCHMARK(BM_DualTv)->Arg(4)->Arg(22)->Arg(128);
BENCHMARK(BM_DualChi2)->Arg(4)->Arg(22)->Arg(128);
BENCHMARK(BM_DualKl)->Arg(4)->Arg(22)->Arg(128);
BENCHMARK(BM_RobustValueIterationGambler)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimisticPlanningGambler)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
