#include "rrl/dp.hpp"

#include <limits>
#include <numeric>

namespace rrl {

namespace {

template <class Backup>
RobustSolution backward_induction(const FiniteRMDP& model, Backup&& backup) {
    const std::size_t S = model.num_states(), A = model.num_actions(), H = model.horizon();
    RobustSolution sol{ValueTable(H, S), QTable(H, S, A), DeterministicPolicy(H, S)};
    for (std::size_t h = H; h-- > 0;) {
        const auto next = sol.values.step(h + 1);
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t best_action = 0;
            for (std::size_t a = 0; a < A; ++a) {
                if (!model.legal(h, s, a)) continue;
                const double q = model.reward(h, s, a) + backup(model.row(h, s, a), next);
                sol.q_values(h, s, a) = q;
                if (q > best) {
                    best = q;
                    best_action = a;
                }
            }
            sol.values(h, s) = best;
            sol.policy(h, s) = best_action;
        }
    }
    return sol;
}

template <class Backup>
ValueTable evaluate(const FiniteRMDP& model, const DeterministicPolicy& policy, Backup&& backup) {
    require_legal_policy(model, policy);
    const std::size_t S = model.num_states(), H = model.horizon();
    ValueTable values(H, S);
    for (std::size_t h = H; h-- > 0;) {
        const auto next = values.step(h + 1);
        for (std::size_t s = 0; s < S; ++s) {
            const std::size_t a = policy(h, s);
            values(h, s) = model.reward(h, s, a) + backup(model.row(h, s, a), next);
        }
    }
    return values;
}

double nominal_backup(std::span<const double> row, std::span<const double> next) {
    return std::inner_product(row.begin(), row.end(), next.begin(), 0.0);
}

}  // namespace

RobustSolution robust_value_iteration(const FiniteRMDP& model, const DualSolverConfig& cfg) {
    require_valid(model);
    cfg.validate();
    const auto spec = model.uncertainty();
    return backward_induction(model, [&](std::span<const double> row, std::span<const double> next) {
        return robust_expectation(spec, row, next, cfg);
    });
}

ValueTable robust_policy_evaluation(const FiniteRMDP& model, const DeterministicPolicy& policy,
                                    const DualSolverConfig& cfg) {
    cfg.validate();
    const auto spec = model.uncertainty();
    return evaluate(model, policy, [&](std::span<const double> row, std::span<const double> next) {
        return robust_expectation(spec, row, next, cfg);
    });
}

RobustSolution nominal_value_iteration(const FiniteRMDP& model) {
    require_valid(model);
    return backward_induction(model, nominal_backup);
}

ValueTable nominal_policy_evaluation(const FiniteRMDP& model, const DeterministicPolicy& policy) {
    return evaluate(model, policy, nominal_backup);
}

}  // namespace rrl
