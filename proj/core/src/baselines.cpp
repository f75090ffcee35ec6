#include "rrl/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace rrl {

ConfidenceState ucbvi_planning(const EmpiricalKernel& p_hat, const VisitCounts& counts, const AgentConfig& cfg,
                               const FiniteRMDP& model) {
    const std::size_t S = model.num_states(), A = model.num_actions(), H = model.horizon();
    const double L = log_factor(S, A, H, cfg.total_episodes, cfg.failure_prob);
    ConfidenceState st{QTable(H, S, A), QTable(H, S, A), ValueTable(H, S), ValueTable(H, S),
                       DeterministicPolicy(H, S)};
    for (std::size_t h = H; h-- > 0;) {
        const double cap = cfg.value_cap(h, H);
        const auto next = st.upper_v.step(h + 1);
        for (std::size_t s = 0; s < S; ++s) {
            double best = -1.0;
            std::size_t best_action = 0;
            for (std::size_t a = 0; a < A; ++a) {
                if (!model.legal(h, s, a)) continue;
                double q = cap;
                if (p_hat.visited(h, s, a)) {
                    const auto row = p_hat.row(h, s, a);
                    double expect = 0.0;
                    for (std::size_t i = 0; i < S; ++i) expect += row[i] * next[i];
                    const double n = static_cast<double>(counts.pair(h, s, a));
                    const double bonus = cfg.hoeffding_scale * static_cast<double>(H) * std::sqrt(L / n);
                    q = std::min(model.reward(h, s, a) + expect + bonus, cap);
                }
                st.upper_q(h, s, a) = q;
                if (q > best) {
                    best = q;
                    best_action = a;
                }
            }
            st.upper_v(h, s) = best;
            st.policy(h, s) = best_action;
        }
    }
    return st;
}

OnlineRun ucbvi_run(const FiniteRMDP& env, const AgentConfig& cfg, const EpisodeObserver& observer) {
    return run_online(
        env, cfg,
        [&](const EmpiricalKernel& p_hat, const VisitCounts& counts) {
            return ucbvi_planning(p_hat, counts, cfg, env);
        },
        observer);
}

}  // namespace rrl
