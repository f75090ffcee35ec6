#include "rrl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace rrl {

FiniteRMDP build_gambler(std::size_t target, std::size_t horizon, double p_head, DivergenceSpec spec,
                         std::size_t initial_capital) {
    if (target < 2) throw ModelError("gambler target must be at least 2");
    if (!(p_head > 0.0 && p_head < 1.0)) throw ModelError("p_head must lie in (0,1)");
    if (initial_capital == static_cast<std::size_t>(-1)) initial_capital = target / 2;
    if (initial_capital > target) throw ModelError("initial capital exceeds the target");

    const std::size_t sink = target + 1;
    const std::size_t num_states = target + 2;
    const std::size_t num_actions = target / 2 + 1;
    FiniteRMDP model(num_states, num_actions, horizon, spec, initial_capital);
    for (std::size_t h = 0; h < horizon; ++h) {
        for (std::size_t s = 0; s < num_states; ++s) {
            const std::size_t max_stake = (s == sink) ? 0 : std::min(s, target - s);
            for (std::size_t a = 0; a < num_actions; ++a) {
                model.set_legal(h, s, a, a <= max_stake);
                if (a > max_stake) continue;
                if (s == sink || s == 0) {
                    model.kernel(h, s, a, s) = 1.0;
                } else if (s == target) {
                    model.reward(h, s, a) = 1.0;
                    model.kernel(h, s, a, sink) = 1.0;
                } else if (a == 0) {
                    model.kernel(h, s, a, s) = 1.0;
                } else {
                    model.kernel(h, s, a, s + a) = p_head;
                    model.kernel(h, s, a, s - a) = 1.0 - p_head;
                }
            }
        }
    }
    return model;
}

LakeLayout canonical_lake_4x4() { return {"SFFF", "FHFH", "FFFH", "HFFG"}; }

namespace {

struct Cell {
    std::size_t row;
    std::size_t col;
};

void check_layout(const LakeLayout& layout) {
    if (layout.size() < 2) throw ModelError("lake layout needs at least two rows");
    const std::size_t width = layout.front().size();
    if (width < 2) throw ModelError("lake layout needs at least two columns");
    std::size_t starts = 0, goals = 0;
    for (const auto& row : layout) {
        if (row.size() != width) throw ModelError("lake layout rows differ in length");
        for (char c : row) {
            if (c != 'S' && c != 'F' && c != 'H' && c != 'G')
                throw ModelError(std::string("lake layout has unknown cell '") + c + "'");
            starts += c == 'S';
            goals += c == 'G';
        }
    }
    if (starts != 1 || goals != 1) throw ModelError("lake layout needs exactly one S and one G");
}

Cell move(const LakeLayout& layout, Cell c, std::size_t direction) {
    const std::size_t rows = layout.size(), cols = layout.front().size();
    switch (direction) {
    case kLeft: return {c.row, c.col == 0 ? 0 : c.col - 1};
    case kDown: return {std::min(c.row + 1, rows - 1), c.col};
    case kRight: return {c.row, std::min(c.col + 1, cols - 1)};
    case kUp: return {c.row == 0 ? 0 : c.row - 1, c.col};
    }
    return c;
}

}  // namespace

bool lake_connected(const LakeLayout& layout) {
    check_layout(layout);
    const std::size_t rows = layout.size(), cols = layout.front().size();
    std::vector<char> seen(rows * cols, 0);
    std::queue<Cell> frontier;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (layout[r][c] == 'S') {
                frontier.push({r, c});
                seen[r * cols + c] = 1;
            }
    while (!frontier.empty()) {
        const Cell cur = frontier.front();
        frontier.pop();
        if (layout[cur.row][cur.col] == 'G') return true;
        for (std::size_t d = 0; d < 4; ++d) {
            const Cell nxt = move(layout, cur, d);
            const std::size_t idx = nxt.row * cols + nxt.col;
            if (seen[idx] || layout[nxt.row][nxt.col] == 'H') continue;
            seen[idx] = 1;
            frontier.push(nxt);
        }
    }
    return false;
}

LakeLayout random_lake_layout(std::size_t side, std::uint64_t layout_seed, double hole_prob) {
    if (side < 2) throw ModelError("lake side must be at least 2");
    if (!(hole_prob >= 0.0 && hole_prob < 1.0)) throw ModelError("hole_prob must lie in [0,1)");
    Rng rng(Rng::derive_seed(layout_seed, 0x1a4e));
    for (;;) {
        LakeLayout layout(side, std::string(side, 'F'));
        for (std::size_t r = 0; r < side; ++r)
            for (std::size_t c = 0; c < side; ++c)
                if (rng.uniform() < hole_prob) layout[r][c] = 'H';
        layout[0][0] = 'S';
        layout[side - 1][side - 1] = 'G';
        if (lake_connected(layout)) return layout;
    }
}

FiniteRMDP build_frozen_lake(const LakeLayout& layout, std::size_t horizon, DivergenceSpec spec) {
    check_layout(layout);
    if (!lake_connected(layout)) throw ModelError("lake layout has no path from S to G");
    const std::size_t rows = layout.size(), cols = layout.front().size();
    const std::size_t cells = rows * cols;
    const std::size_t sink = cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i < cells; ++i)
        if (layout[i / cols][i % cols] == 'S') start = i;

    FiniteRMDP model(cells + 1, 4, horizon, spec, start);
    for (std::size_t h = 0; h < horizon; ++h) {
        for (std::size_t a = 0; a < 4; ++a) model.kernel(h, sink, a, sink) = 1.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const char kind = layout[i / cols][i % cols];
            for (std::size_t a = 0; a < 4; ++a) {
                if (kind == 'H' || kind == 'G') {
                    model.kernel(h, i, a, sink) = 1.0;
                    model.reward(h, i, a) = kind == 'G' ? 1.0 : 0.0;
                    continue;
                }
                for (std::size_t d : {(a + 3) % 4, a, (a + 1) % 4}) {
                    const Cell nxt = move(layout, {i / cols, i % cols}, d);
                    model.kernel(h, i, a, nxt.row * cols + nxt.col) += 1.0 / 3.0;
                }
            }
        }
    }
    return model;
}

FiniteRMDP build_frozen_lake(std::size_t side, std::size_t horizon, DivergenceSpec spec, std::uint64_t layout_seed) {
    return build_frozen_lake(side == 4 ? canonical_lake_4x4() : random_lake_layout(side, layout_seed), horizon, spec);
}

void HardInstanceSpec::validate() const {
    if (num_actions < 1) throw ModelError("hard instance needs at least one action");
    if (!(branch_prob > 0.0 && branch_prob < 1.0)) throw ModelError("branch_prob must lie in (0,1)");
    if (horizon < 2) throw ModelError("hard instance horizon must be at least 2");
    if (special_action_index >= num_actions) throw ModelError("special action index out of range");
    if (!(base_mean >= 0.0 && base_mean < 1.0)) throw ModelError("base_mean must lie in [0,1)");
    if (!(boost >= 1.0)) throw ModelError("boost must be at least 1");
    if (special_action_index != 0 && !(boost * base_mean < 1.0))
        throw ModelError("boosted mean must stay below 1");
}

double HardInstance::sample_reward(std::size_t state, std::size_t action, Rng& rng) const {
    if (state == kHardS2) return action_means.at(action) + rng.normal();
    return state == kHardS3 ? 1.0 : 0.0;
}

HardInstance build_hard_instance(const HardInstanceSpec& spec) {
    spec.validate();
    const std::size_t A = spec.num_actions;
    std::vector<double> means(A, 0.0);
    means[0] = spec.base_mean;
    if (spec.special_action_index != 0) means[spec.special_action_index] = spec.boost * spec.base_mean;

    FiniteRMDP model(3, A, spec.horizon, spec.divergence, kHardS1);
    for (std::size_t h = 0; h < spec.horizon; ++h)
        for (std::size_t a = 0; a < A; ++a) {
            // s1 is only reachable at the first step; later rows repeat the branch.
            model.kernel(h, kHardS1, a, kHardS2) = spec.branch_prob;
            model.kernel(h, kHardS1, a, kHardS3) = 1.0 - spec.branch_prob;
            model.kernel(h, kHardS2, a, kHardS2) = 1.0;
            model.kernel(h, kHardS3, a, kHardS3) = 1.0;
            model.reward(h, kHardS2, a) = means[a];
            model.reward(h, kHardS3, a) = 1.0;
        }
    return {std::move(model), std::move(means)};
}

double hard_instance_worst_branch(DivergenceSpec spec, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ModelError("branch probability must lie in (0,1)");
    const double sigma = spec.radius;
    switch (spec.kind) {
    case DivergenceKind::TV: return std::min(1.0, p + 0.5 * sigma);
    case DivergenceKind::Chi2: return std::min(1.0, p + std::sqrt(sigma * p * (1.0 - p)));
    case DivergenceKind::KL: {
        auto kl = [p](double q) {
            const double tail = q < 1.0 ? (1.0 - q) * std::log((1.0 - q) / (1.0 - p)) : 0.0;
            return q * std::log(q / p) + tail;
        };
        if (kl(1.0) <= sigma) return 1.0;
        double lo = p, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (kl(mid) <= sigma ? lo : hi) = mid;
        }
        return lo;
    }
    }
    throw ModelError("unsupported divergence");
}

KlLowerBoundTuning kl_lower_bound_tuning(double p, double sigma) {
    if (!(p > 0.0 && p < 1.0)) throw ModelError("branch probability must lie in (0,1)");
    KlLowerBoundTuning t;
    t.alpha = 1.0 - p;
    const double log_inv = std::log(1.0 / t.alpha);
    t.beta = 0.5 * log_inv;
    t.sigma_lo = (1.0 - 3.0 / t.beta) * log_inv;
    t.sigma_hi = (1.0 - 2.0 / t.beta) * log_inv;
    t.feasible = t.beta > 0.0 && sigma >= t.sigma_lo && sigma <= t.sigma_hi;
    return t;
}

}  // namespace rrl
