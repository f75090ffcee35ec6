#pragma once

#include "rrl/dual.hpp"
#include "rrl/model.hpp"

namespace rrl {

struct RobustSolution {
    ValueTable values;
    QTable q_values;
    DeterministicPolicy policy;
};

/// Backward induction with Q = r + inf_{P in U} E_P[V_{h+1}] and V = max over legal actions.
/// Ties go to the lowest action index. Illegal Q entries are left at zero.
RobustSolution robust_value_iteration(const FiniteRMDP& model, const DualSolverConfig& cfg = {});

/// Robust value of a fixed deterministic policy.
ValueTable robust_policy_evaluation(const FiniteRMDP& model, const DeterministicPolicy& policy,
                                    const DualSolverConfig& cfg = {});

/// Plain (non-robust) finite-horizon value iteration on the nominal kernel.
RobustSolution nominal_value_iteration(const FiniteRMDP& model);

/// Plain (non-robust) evaluation of a fixed policy on the nominal kernel.
ValueTable nominal_policy_evaluation(const FiniteRMDP& model, const DeterministicPolicy& policy);

}  // namespace rrl
