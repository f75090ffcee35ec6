#pragma once

#include "rrl/agent.hpp"

namespace rrl {

/// Non-robust optimistic value iteration on the empirical kernel with the Hoeffding
/// bonus c H sqrt(L / (N v 1)); Q is clipped to [0, cfg.value_cap(h, H)]. Only the upper tables
/// are meaningful; the lower tables are zero.
ConfidenceState ucbvi_planning(const EmpiricalKernel& p_hat, const VisitCounts& counts, const AgentConfig& cfg,
                               const FiniteRMDP& model);

/// UCB-VI online loop. The model's uncertainty set is ignored.
OnlineRun ucbvi_run(const FiniteRMDP& env, const AgentConfig& cfg, const EpisodeObserver& observer = {});

}  // namespace rrl
