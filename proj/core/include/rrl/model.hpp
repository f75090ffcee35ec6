#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rrl {

/// Thrown when a model, policy, or input vector violates a documented contract.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class DivergenceKind { TV, Chi2, KL };

std::string_view to_string(DivergenceKind kind);
/// Accepts "tv", "chi2", "kl" (case-insensitive; "chi-square" and "chi^2" are aliases).
DivergenceKind parse_divergence(std::string_view name);

/// The f-divergence and radius that define every (h,s,a) uncertainty ball.
struct DivergenceSpec {
    DivergenceKind kind = DivergenceKind::Chi2;
    double radius = 0.0;

    DivergenceSpec() = default;
    DivergenceSpec(DivergenceKind k, double sigma);

    bool operator==(const DivergenceSpec&) const = default;
};

/**
 * Finite-horizon robust MDP with an (s,a)-rectangular f-divergence uncertainty set.
 *
 * Steps are 0-based: h = 0..H-1 are decision steps and value tables carry an extra
 * terminal row h = H that is identically zero. Tensors are stored densely in
 * row-major order [h][s][a][s'], even when the kernel is time-homogeneous.
 */
class FiniteRMDP {
public:
    FiniteRMDP() = default;
    /// Creates a model with zero kernel, zero reward, and every action legal.
    FiniteRMDP(std::size_t num_states, std::size_t num_actions, std::size_t horizon,
               DivergenceSpec uncertainty = {}, std::size_t initial_state = 0);

    std::size_t num_states() const { return states_; }
    std::size_t num_actions() const { return actions_; }
    std::size_t horizon() const { return horizon_; }
    std::size_t initial_state() const { return initial_state_; }
    const DivergenceSpec& uncertainty() const { return uncertainty_; }

    void set_initial_state(std::size_t s);
    void set_uncertainty(DivergenceSpec spec);

    double kernel(std::size_t h, std::size_t s, std::size_t a, std::size_t next) const {
        return kernel_[row_offset(h, s, a) + next];
    }
    double& kernel(std::size_t h, std::size_t s, std::size_t a, std::size_t next) {
        return kernel_[row_offset(h, s, a) + next];
    }
    std::span<const double> row(std::size_t h, std::size_t s, std::size_t a) const {
        return {kernel_.data() + row_offset(h, s, a), states_};
    }
    std::span<double> row(std::size_t h, std::size_t s, std::size_t a) {
        return {kernel_.data() + row_offset(h, s, a), states_};
    }

    double reward(std::size_t h, std::size_t s, std::size_t a) const {
        return reward_[pair_index(h, s, a)];
    }
    double& reward(std::size_t h, std::size_t s, std::size_t a) {
        return reward_[pair_index(h, s, a)];
    }

    bool legal(std::size_t h, std::size_t s, std::size_t a) const {
        return legal_[pair_index(h, s, a)] != 0;
    }
    void set_legal(std::size_t h, std::size_t s, std::size_t a, bool value) {
        legal_[pair_index(h, s, a)] = value ? 1 : 0;
    }

    /// Lowest-index legal action at (h,s); throws if none exists.
    std::size_t first_legal_action(std::size_t h, std::size_t s) const;

    std::size_t pair_index(std::size_t h, std::size_t s, std::size_t a) const {
        return (h * states_ + s) * actions_ + a;
    }

    const std::vector<double>& kernel_data() const { return kernel_; }
    const std::vector<double>& reward_data() const { return reward_; }
    const std::vector<std::uint8_t>& legal_data() const { return legal_; }

    bool operator==(const FiniteRMDP&) const = default;

private:
    std::size_t row_offset(std::size_t h, std::size_t s, std::size_t a) const {
        return pair_index(h, s, a) * states_;
    }

    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::size_t horizon_ = 0;
    std::size_t initial_state_ = 0;
    DivergenceSpec uncertainty_;
    std::vector<double> kernel_;
    std::vector<double> reward_;
    std::vector<std::uint8_t> legal_;
};

/// Deterministic Markov policy, action[h][s] stored flat.
class DeterministicPolicy {
public:
    DeterministicPolicy() = default;
    DeterministicPolicy(std::size_t horizon, std::size_t num_states, std::size_t fill = 0)
        : states_(num_states), actions_(horizon * num_states, fill) {}

    std::size_t horizon() const { return states_ == 0 ? 0 : actions_.size() / states_; }
    std::size_t num_states() const { return states_; }

    std::size_t operator()(std::size_t h, std::size_t s) const { return actions_[h * states_ + s]; }
    std::size_t& operator()(std::size_t h, std::size_t s) { return actions_[h * states_ + s]; }

    const std::vector<std::size_t>& actions() const { return actions_; }

    /// 64-bit FNV-1a over the action table.
    std::uint64_t content_hash() const;

    bool operator==(const DeterministicPolicy&) const = default;

private:
    std::size_t states_ = 0;
    std::vector<std::size_t> actions_;
};

struct PolicyHash {
    std::size_t operator()(const DeterministicPolicy& p) const {
        return static_cast<std::size_t>(p.content_hash());
    }
};

/// V[h][s] for h = 0..H, with the terminal row h = H held at zero.
class ValueTable {
public:
    ValueTable() = default;
    ValueTable(std::size_t horizon, std::size_t num_states)
        : states_(num_states), values_((horizon + 1) * num_states, 0.0) {}

    std::size_t num_states() const { return states_; }
    std::size_t horizon() const { return states_ == 0 ? 0 : values_.size() / states_ - 1; }

    double operator()(std::size_t h, std::size_t s) const { return values_[h * states_ + s]; }
    double& operator()(std::size_t h, std::size_t s) { return values_[h * states_ + s]; }

    std::span<const double> step(std::size_t h) const { return {values_.data() + h * states_, states_}; }
    std::span<double> step(std::size_t h) { return {values_.data() + h * states_, states_}; }

private:
    std::size_t states_ = 0;
    std::vector<double> values_;
};

/// Q[h][s][a] for decision steps h = 0..H-1.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t horizon, std::size_t num_states, std::size_t num_actions)
        : states_(num_states), actions_(num_actions),
          values_(horizon * num_states * num_actions, 0.0) {}

    std::size_t num_states() const { return states_; }
    std::size_t num_actions() const { return actions_; }

    double operator()(std::size_t h, std::size_t s, std::size_t a) const {
        return values_[(h * states_ + s) * actions_ + a];
    }
    double& operator()(std::size_t h, std::size_t s, std::size_t a) {
        return values_[(h * states_ + s) * actions_ + a];
    }

private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> values_;
};

struct Transition {
    std::size_t step = 0;
    std::size_t state = 0;
    std::size_t action = 0;
    double reward = 0.0;
    std::size_t next_state = 0;
};

/// One episode of exactly H transitions.
struct EpisodeTrajectory {
    std::vector<Transition> steps;

    double total_reward() const;
    /// True when every step's next state is the following step's state.
    bool chained() const;
};

/// N_h(s,a,s') and N_h(s,a); the pair counts are maintained as row sums.
class VisitCounts {
public:
    VisitCounts() = default;
    VisitCounts(std::size_t horizon, std::size_t num_states, std::size_t num_actions);

    std::size_t horizon() const { return horizon_; }
    std::size_t num_states() const { return states_; }
    std::size_t num_actions() const { return actions_; }

    std::uint64_t pair(std::size_t h, std::size_t s, std::size_t a) const {
        return pair_[(h * states_ + s) * actions_ + a];
    }
    std::uint64_t triple(std::size_t h, std::size_t s, std::size_t a, std::size_t next) const {
        return triple_[((h * states_ + s) * actions_ + a) * states_ + next];
    }
    std::span<const std::uint64_t> triple_row(std::size_t h, std::size_t s, std::size_t a) const {
        return {triple_.data() + ((h * states_ + s) * actions_ + a) * states_, states_};
    }

    void record(const Transition& t);
    void record(const EpisodeTrajectory& episode);

    std::uint64_t total_transitions() const;
    /// Checks pair = sum of triples everywhere.
    bool consistent() const;

private:
    std::size_t horizon_ = 0;
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<std::uint64_t> triple_;
    std::vector<std::uint64_t> pair_;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Checks kernel rows (nonnegative, sum to 1 within 1e-12), reward range, legality coverage.
ValidationReport validate_rmdp(const FiniteRMDP& model);

/// Throws ModelError listing the first violation when the model is malformed.
void require_valid(const FiniteRMDP& model);

/// Throws ModelError if the policy's shape mismatches the model or picks an illegal action.
void require_legal_policy(const FiniteRMDP& model, const DeterministicPolicy& policy);

}  // namespace rrl
