#include "rrl/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace rrl {

BonusPreset parse_bonus_preset(std::string_view name) {
    if (name == "theory") return BonusPreset::Theory;
    if (name == "practical") return BonusPreset::Practical;
    throw ModelError("unknown bonus preset '" + std::string(name) + "'");
}

std::string_view to_string(BonusPreset preset) {
    return preset == BonusPreset::Theory ? "theory" : "practical";
}

void AgentConfig::validate() const {
    if (total_episodes < 1) throw ModelError("total_episodes must be at least 1");
    if (!(failure_prob > 0.0 && failure_prob < 1.0)) throw ModelError("failure_prob must lie in (0,1)");
    if (!(bonus_scale_c1 >= 0.0 && bonus_scale_c2 >= 0.0 && bonus_scale_cf >= 0.0 && hoeffding_scale >= 0.0))
        throw ModelError("bonus scales must be nonnegative");
    if (!(return_bound > 0.0)) throw ModelError("return_bound must be positive");
    dual_cfg.validate();
}

double AgentConfig::value_cap(std::size_t h, std::size_t horizon) const {
    return std::min(static_cast<double>(horizon - h), return_bound);
}

AgentConfig AgentConfig::with_preset(BonusPreset preset, const FiniteRMDP& model, std::size_t episodes,
                                     double failure_prob, std::uint64_t seed, double return_bound) {
    AgentConfig cfg;
    cfg.total_episodes = episodes;
    cfg.failure_prob = failure_prob;
    cfg.rng_seed = seed;
    if (preset == BonusPreset::Practical) {
        const double S = static_cast<double>(model.num_states());
        const double H = static_cast<double>(model.horizon());
        const double L = log_factor(model.num_states(), model.num_actions(), model.horizon(), episodes, failure_prob);
        const double R = std::min(H, return_bound);
        const double share = R / H;
        cfg.return_bound = return_bound;
        cfg.bonus_scale_c1 = 1.0 / L;
        // count term becomes share * sqrt(sigma / N)
        cfg.bonus_scale_c2 = share / (H * H * S * (2.0 * L + 1.0));
        const double sigma = model.uncertainty().radius;
        // KL term becomes share * sqrt(sigma / (N Pmin)), matching the chi-square count term
        cfg.bonus_scale_cf = sigma > 0.0 ? share * sigma * std::sqrt(sigma) / (2.0 * H * std::sqrt(L)) : 1.0;
        cfg.hoeffding_scale = share / (H * std::sqrt(L));
    }
    cfg.validate();
    return cfg;
}

EmpiricalKernel::EmpiricalKernel(const VisitCounts& counts)
    : states_(counts.num_states()), actions_(counts.num_actions()),
      probs_(counts.horizon() * states_ * actions_ * states_, 0.0),
      visited_(counts.horizon() * states_ * actions_, 0) {
    for (std::size_t h = 0; h < counts.horizon(); ++h)
        for (std::size_t s = 0; s < states_; ++s)
            for (std::size_t a = 0; a < actions_; ++a) {
                const std::uint64_t n = counts.pair(h, s, a);
                if (n == 0) continue;
                const std::size_t idx = (h * states_ + s) * actions_ + a;
                visited_[idx] = 1;
                const auto triples = counts.triple_row(h, s, a);
                for (std::size_t next = 0; next < states_; ++next)
                    probs_[idx * states_ + next] = static_cast<double>(triples[next]) / static_cast<double>(n);
            }
}

EmpiricalKernel empirical_kernel(const VisitCounts& counts) { return EmpiricalKernel(counts); }

double log_factor(std::size_t S, std::size_t A, std::size_t H, std::size_t K, double delta) {
    if (S == 0 || A == 0 || H == 0 || K == 0 || !(delta > 0.0 && delta < 1.0))
        throw ModelError("log_factor: arguments out of range");
    const double s = static_cast<double>(S), a = static_cast<double>(A), h = static_cast<double>(H),
                 k = static_cast<double>(K);
    return 3.0 * std::log(s) + std::log(a) + 2.0 * std::log(h) + 1.5 * std::log(k) - std::log(delta);
}

BonusParameters BonusParameters::from(const FiniteRMDP& model, const AgentConfig& cfg) {
    BonusParameters p;
    p.num_states = model.num_states();
    p.horizon = model.horizon();
    p.episodes = cfg.total_episodes;
    p.sigma = model.uncertainty().radius;
    p.log_term = log_factor(model.num_states(), model.num_actions(), model.horizon(), cfg.total_episodes,
                            cfg.failure_prob);
    p.c1 = cfg.bonus_scale_c1;
    p.c2 = cfg.bonus_scale_c2;
    p.cf = cfg.bonus_scale_cf;
    return p;
}

double bonus_chi2(const BonusParameters& params, std::uint64_t visits, std::span<const double> p_hat,
                  std::span<const double> upper_next, std::span<const double> lower_next,
                  std::size_t fallback_state) {
    if (params.sigma == 0.0) return 0.0;
    const double n = static_cast<double>(std::max<std::uint64_t>(visits, 1));
    const double sigma = params.sigma;
    const double L = params.log_term;
    const double H = static_cast<double>(params.horizon);
    const double S = static_cast<double>(params.num_states);

    double mass = 0.0;
    for (double p : p_hat) mass += p;
    double mean_mid = 0.0, mean_gap = 0.0, var_mid = 0.0;
    if (mass > 0.0) {
        for (std::size_t i = 0; i < p_hat.size(); ++i) {
            if (p_hat[i] <= 0.0) continue;
            mean_mid += p_hat[i] * 0.5 * (upper_next[i] + lower_next[i]);
            mean_gap += p_hat[i] * (upper_next[i] - lower_next[i]);
        }
        for (std::size_t i = 0; i < p_hat.size(); ++i) {
            if (p_hat[i] <= 0.0) continue;
            const double d = 0.5 * (upper_next[i] + lower_next[i]) - mean_mid;
            var_mid += p_hat[i] * d * d;
        }
    } else {
        mean_gap = upper_next[fallback_state] - lower_next[fallback_state];
    }
    var_mid = std::max(var_mid, 0.0);

    const double variance_term = std::sqrt(sigma * params.c1 * L * var_mid / n);
    const double envelope_term = 2.0 * std::sqrt(sigma) * mean_gap / H;
    const double count_term = params.c2 * std::sqrt(sigma) * H * H * S * (2.0 * L + 1.0) / std::sqrt(n);
    const double horizon_term = std::sqrt(sigma / static_cast<double>(params.episodes));
    return variance_term + envelope_term + count_term + horizon_term;
}

double bonus_kl(const BonusParameters& params, std::uint64_t visits, std::span<const double> p_hat) {
    if (!(params.sigma > 0.0)) throw ModelError("KL bonus requires sigma > 0");
    const double n = static_cast<double>(std::max<std::uint64_t>(visits, 1));
    double p_min = std::numeric_limits<double>::infinity();
    for (double p : p_hat)
        if (p > 0.0) p_min = std::min(p_min, p);
    if (!std::isfinite(p_min)) p_min = 1.0;
    const double H = static_cast<double>(params.horizon);
    return 2.0 * params.cf * H / params.sigma * std::sqrt(params.log_term / (n * p_min)) +
           std::sqrt(1.0 / static_cast<double>(params.episodes));
}

ConfidenceState optimistic_planning(const EmpiricalKernel& p_hat, const VisitCounts& counts,
                                    const AgentConfig& cfg, const FiniteRMDP& model) {
    const auto spec = model.uncertainty();
    if (spec.kind != DivergenceKind::Chi2 && spec.kind != DivergenceKind::KL)
        throw ModelError("optimistic planning supports chi2 and kl uncertainty only");
    const std::size_t S = model.num_states(), A = model.num_actions(), H = model.horizon();
    const auto params = BonusParameters::from(model, cfg);

    ConfidenceState st{QTable(H, S, A), QTable(H, S, A), ValueTable(H, S), ValueTable(H, S),
                       DeterministicPolicy(H, S)};
    for (std::size_t h = H; h-- > 0;) {
        const double cap = cfg.value_cap(h, H);
        const auto upper_next = st.upper_v.step(h + 1);
        const auto lower_next = st.lower_v.step(h + 1);
        for (std::size_t s = 0; s < S; ++s) {
            double best_upper = -1.0, best_lower = -1.0;
            std::size_t best_action = 0;
            for (std::size_t a = 0; a < A; ++a) {
                if (!model.legal(h, s, a)) continue;
                double qu = cap, ql = 0.0;
                if (p_hat.visited(h, s, a)) {
                    const auto row = p_hat.row(h, s, a);
                    const std::uint64_t n = counts.pair(h, s, a);
                    const double bonus = spec.kind == DivergenceKind::Chi2
                                             ? bonus_chi2(params, n, row, upper_next, lower_next, s)
                                             : bonus_kl(params, n, row);
                    const double r = model.reward(h, s, a);

                    // The robust expectation lies between the support minimum and the
                    // nominal mean, so clipped outcomes can be decided without the dual.
                    double support_min = std::numeric_limits<double>::infinity(), lower_mean = 0.0;
                    for (std::size_t i = 0; i < S; ++i) {
                        if (row[i] <= 0.0) continue;
                        support_min = std::min(support_min, upper_next[i]);
                        lower_mean += row[i] * lower_next[i];
                    }
                    if (r + support_min + bonus < cap)
                        qu = std::min(r + robust_expectation(spec, row, upper_next, cfg.dual_cfg) + bonus, cap);
                    if (r + lower_mean - bonus > 0.0)
                        ql = std::max(r + robust_expectation(spec, row, lower_next, cfg.dual_cfg) - bonus, 0.0);
                    ql = std::min(ql, qu);
                }
                st.upper_q(h, s, a) = qu;
                st.lower_q(h, s, a) = ql;
                if (qu > best_upper) {
                    best_upper = qu;
                    best_action = a;
                }
                best_lower = std::max(best_lower, ql);
            }
            st.upper_v(h, s) = best_upper;
            st.lower_v(h, s) = best_lower;
            st.policy(h, s) = best_action;
        }
    }
    return st;
}

EpisodeTrajectory run_episode(const FiniteRMDP& env, const DeterministicPolicy& policy, Rng& rng) {
    EpisodeTrajectory traj;
    traj.steps.reserve(env.horizon());
    std::size_t s = env.initial_state();
    for (std::size_t h = 0; h < env.horizon(); ++h) {
        const std::size_t a = policy(h, s);
        if (a >= env.num_actions() || !env.legal(h, s, a)) throw ModelError("run_episode: illegal policy action");
        const std::size_t next = rng.categorical(env.row(h, s, a));
        traj.steps.push_back({h, s, a, env.reward(h, s, a), next});
        s = next;
    }
    return traj;
}

const DeterministicPolicy& output_policy(std::span<const DeterministicPolicy> policies, Rng& rng) {
    if (policies.empty()) throw ModelError("output_policy: no policies to choose from");
    return policies[rng.below(policies.size())];
}

OnlineRun run_online(const FiniteRMDP& env, const AgentConfig& cfg, const Planner& planner,
                     const EpisodeObserver& observer) {
    cfg.validate();
    require_valid(env);
    using clock = std::chrono::steady_clock;
    OnlineRun run{{}, VisitCounts(env.horizon(), env.num_states(), env.num_actions())};
    run.policies.reserve(cfg.total_episodes);
    Rng rng(Rng::derive_seed(cfg.rng_seed, 1));
    for (std::size_t k = 0; k < cfg.total_episodes; ++k) {
        const auto t0 = clock::now();
        const EmpiricalKernel p_hat(run.counts);
        ConfidenceState state = planner(p_hat, run.counts);
        const auto t1 = clock::now();
        const auto traj = run_episode(env, state.policy, rng);
        run.counts.record(traj);
        const auto t2 = clock::now();
        run.planning_seconds += std::chrono::duration<double>(t1 - t0).count();
        run.acting_seconds += std::chrono::duration<double>(t2 - t1).count();
        if (observer) observer(k, state, traj);
        run.policies.push_back(std::move(state.policy));
    }
    return run;
}

OnlineRun rvi_run(const FiniteRMDP& env, const AgentConfig& cfg, const EpisodeObserver& observer) {
    const auto kind = env.uncertainty().kind;
    if (kind != DivergenceKind::Chi2 && kind != DivergenceKind::KL)
        throw ModelError("RVI supports chi2 and kl uncertainty only");
    if (kind == DivergenceKind::KL && !(env.uncertainty().radius > 0.0))
        throw ModelError("RVI with KL uncertainty requires sigma > 0");
    return run_online(
        env, cfg,
        [&](const EmpiricalKernel& p_hat, const VisitCounts& counts) {
            return optimistic_planning(p_hat, counts, cfg, env);
        },
        observer);
}

}  // namespace rrl
