#pragma once

#include "rrl/agent.hpp"
#include "rrl/regret.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rrl {

enum class Algorithm { Rvi, UcbVi };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

/**
 * Experiment grid read from a JSON config:
 *   {"environment": "gambler" | "frozen_lake" | "hard_instance", "env_params": {...},
 *    "algorithm": "rvi" | "ucbvi" | [...], "divergence": "chi2", "sigma": 0.3 | [...],
 *    "H": 20 | [...], "K": 2000, "seeds": [...], "bonus_preset": "theory" | "practical",
 *    "output_dir": "..."}
 * Optional: "failure_prob" (default 0.1).
 */
struct ExperimentConfig {
    std::string environment;
    nlohmann::json env_params = nlohmann::json::object();
    std::vector<Algorithm> algorithms;
    DivergenceKind divergence = DivergenceKind::Chi2;
    std::vector<double> sigmas;
    std::vector<std::size_t> horizons;
    std::size_t episodes = 1;
    std::vector<std::uint64_t> seeds;
    BonusPreset bonus_preset = BonusPreset::Practical;
    double failure_prob = 0.1;
    std::filesystem::path output_dir;
    nlohmann::json source;

    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig load(const std::filesystem::path& path);
};

/// One (environment, algorithm, sigma, H) combination of the grid.
struct ExperimentCell {
    Algorithm algorithm = Algorithm::Rvi;
    double sigma = 0.0;
    std::size_t horizon = 1;

    std::string name(const ExperimentConfig& cfg) const;
};

std::vector<ExperimentCell> expand_cells(const ExperimentConfig& cfg);

/// Builds the environment named by the config for the given radius and horizon.
FiniteRMDP build_environment(const ExperimentConfig& cfg, double sigma, std::size_t horizon);

/// env_params.return_bound if given; otherwise 1 for gambler and frozen_lake (the reward is
/// collected at most once per episode) and unbounded for hard_instance.
double episode_return_bound(const ExperimentConfig& cfg);

/// Runs one seed of one cell: online learning followed by exact robust regret.
RunRecord run_cell(const ExperimentConfig& cfg, const ExperimentCell& cell, std::uint64_t seed);

/// Shortest round-trip decimal text for a double.
std::string format_double(double x);

/// Header: episode,gap,cumulative_regret,seed
void write_run_csv(const RunRecord& record, std::ostream& out);
void write_run_csv(const RunRecord& record, const std::filesystem::path& path);

/// Header: episode,mean_regret,ci_lower,ci_upper,n_seeds
void write_aggregate_csv(std::span<const AggregateRow> rows, std::ostream& out);
void write_aggregate_csv(std::span<const AggregateRow> rows, const std::filesystem::path& path);
/// Throws std::runtime_error on a malformed file.
std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path);

/// Worker cap: RRL_THREADS if set and positive, else the hardware concurrency.
std::size_t worker_threads();

/**
 * Runs every (cell, seed) of the grid, writing <output_dir>/<cell>/seed_<n>.csv,
 * <output_dir>/<cell>/aggregate.csv and <output_dir>/manifest.json. Failed seeds are
 * recorded in the manifest and the cell is marked incomplete; completed files are kept.
 */
std::filesystem::path run_experiment(const ExperimentConfig& cfg);
std::filesystem::path run_experiment(const std::filesystem::path& config_path);

}  // namespace rrl
