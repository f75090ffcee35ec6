#include "rrl/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rrl {

std::string_view to_string(DivergenceKind kind) {
    switch (kind) {
    case DivergenceKind::TV: return "tv";
    case DivergenceKind::Chi2: return "chi2";
    case DivergenceKind::KL: return "kl";
    }
    return "unknown";
}

DivergenceKind parse_divergence(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "tv") return DivergenceKind::TV;
    if (lower == "chi2" || lower == "chi-square" || lower == "chi^2") return DivergenceKind::Chi2;
    if (lower == "kl") return DivergenceKind::KL;
    throw ModelError("unknown divergence '" + std::string(name) + "'");
}

DivergenceSpec::DivergenceSpec(DivergenceKind k, double sigma) : kind(k), radius(sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ModelError("divergence radius must be finite and nonnegative");
}

FiniteRMDP::FiniteRMDP(std::size_t num_states, std::size_t num_actions, std::size_t horizon,
                       DivergenceSpec uncertainty, std::size_t initial_state)
    : states_(num_states), actions_(num_actions), horizon_(horizon),
      initial_state_(initial_state), uncertainty_(uncertainty),
      kernel_(horizon * num_states * num_actions * num_states, 0.0),
      reward_(horizon * num_states * num_actions, 0.0),
      legal_(horizon * num_states * num_actions, 1) {
    if (num_states == 0 || num_actions == 0 || horizon == 0)
        throw ModelError("S, A and H must all be positive");
    if (initial_state >= num_states) throw ModelError("initial state out of range");
}

void FiniteRMDP::set_initial_state(std::size_t s) {
    if (s >= states_) throw ModelError("initial state out of range");
    initial_state_ = s;
}

void FiniteRMDP::set_uncertainty(DivergenceSpec spec) { uncertainty_ = spec; }

std::size_t FiniteRMDP::first_legal_action(std::size_t h, std::size_t s) const {
    for (std::size_t a = 0; a < actions_; ++a)
        if (legal(h, s, a)) return a;
    std::ostringstream msg;
    msg << "no legal action at (h=" << h << ",s=" << s << ")";
    throw ModelError(msg.str());
}

std::uint64_t DeterministicPolicy::content_hash() const {
    std::uint64_t hash = 1469598103934665603ULL;
    auto mix = [&hash](std::uint64_t v) {
        for (int byte = 0; byte < 8; ++byte) {
            hash ^= (v >> (8 * byte)) & 0xffU;
            hash *= 1099511628211ULL;
        }
    };
    mix(states_);
    for (std::size_t a : actions_) mix(a);
    return hash;
}

double EpisodeTrajectory::total_reward() const {
    return std::accumulate(steps.begin(), steps.end(), 0.0,
                           [](double acc, const Transition& t) { return acc + t.reward; });
}

bool EpisodeTrajectory::chained() const {
    for (std::size_t i = 0; i + 1 < steps.size(); ++i)
        if (steps[i].next_state != steps[i + 1].state) return false;
    return true;
}

VisitCounts::VisitCounts(std::size_t horizon, std::size_t num_states, std::size_t num_actions)
    : horizon_(horizon), states_(num_states), actions_(num_actions),
      triple_(horizon * num_states * num_actions * num_states, 0),
      pair_(horizon * num_states * num_actions, 0) {}

void VisitCounts::record(const Transition& t) {
    if (t.step >= horizon_ || t.state >= states_ || t.action >= actions_ || t.next_state >= states_)
        throw ModelError("transition index out of range");
    const std::size_t pair_idx = (t.step * states_ + t.state) * actions_ + t.action;
    ++pair_[pair_idx];
    ++triple_[pair_idx * states_ + t.next_state];
}

void VisitCounts::record(const EpisodeTrajectory& episode) {
    for (const auto& t : episode.steps) record(t);
}

std::uint64_t VisitCounts::total_transitions() const {
    return std::accumulate(pair_.begin(), pair_.end(), std::uint64_t{0});
}

bool VisitCounts::consistent() const {
    for (std::size_t i = 0; i < pair_.size(); ++i) {
        const auto first = triple_.begin() + static_cast<std::ptrdiff_t>(i * states_);
        if (std::accumulate(first, first + static_cast<std::ptrdiff_t>(states_), std::uint64_t{0}) != pair_[i])
            return false;
    }
    return true;
}

ValidationReport validate_rmdp(const FiniteRMDP& model) {
    ValidationReport report;
    auto where = [](std::size_t h, std::size_t s, std::size_t a) {
        std::ostringstream out;
        out << "(h=" << h << ",s=" << s << ",a=" << a << ")";
        return out.str();
    };
    if (model.num_states() == 0 || model.num_actions() == 0 || model.horizon() == 0) {
        report.violations.emplace_back("empty model dimensions");
        return report;
    }
    if (model.initial_state() >= model.num_states())
        report.violations.emplace_back("initial state out of range");
    if (!(model.uncertainty().radius >= 0.0))
        report.violations.emplace_back("negative divergence radius");

    for (std::size_t h = 0; h < model.horizon(); ++h) {
        for (std::size_t s = 0; s < model.num_states(); ++s) {
            bool any_legal = false;
            for (std::size_t a = 0; a < model.num_actions(); ++a) {
                const double r = model.reward(h, s, a);
                if (!(r >= 0.0 && r <= 1.0)) {
                    std::ostringstream msg;
                    msg << "reward out of [0,1] at " << where(h, s, a) << ": " << r;
                    report.violations.push_back(msg.str());
                }
                if (!model.legal(h, s, a)) continue;
                any_legal = true;
                double sum = 0.0;
                bool negative = false;
                for (double p : model.row(h, s, a)) {
                    if (!(p >= 0.0)) negative = true;
                    sum += p;
                }
                if (negative) report.violations.push_back("row " + where(h, s, a) + " has a negative entry");
                if (std::abs(sum - 1.0) > 1e-12) {
                    std::ostringstream msg;
                    msg << "row " << where(h, s, a) << " sums to " << sum;
                    report.violations.push_back(msg.str());
                }
            }
            if (!any_legal) {
                std::ostringstream msg;
                msg << "no legal action at (h=" << h << ",s=" << s << ")";
                report.violations.push_back(msg.str());
            }
        }
    }
    return report;
}

void require_valid(const FiniteRMDP& model) {
    const auto report = validate_rmdp(model);
    if (!report.ok()) throw ModelError("invalid model: " + report.violations.front());
}

void require_legal_policy(const FiniteRMDP& model, const DeterministicPolicy& policy) {
    if (policy.horizon() != model.horizon() || policy.num_states() != model.num_states())
        throw ModelError("policy shape does not match the model");
    for (std::size_t h = 0; h < model.horizon(); ++h)
        for (std::size_t s = 0; s < model.num_states(); ++s) {
            const std::size_t a = policy(h, s);
            if (a >= model.num_actions() || !model.legal(h, s, a)) {
                std::ostringstream msg;
                msg << "illegal policy action " << a << " at (h=" << h << ",s=" << s << ")";
                throw ModelError(msg.str());
            }
        }
}

}  // namespace rrl
