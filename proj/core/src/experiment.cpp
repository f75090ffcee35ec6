#include "rrl/experiment.hpp"

#include "rrl/baselines.hpp"
#include "rrl/environments.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace rrl {

using nlohmann::json;

std::string_view to_string(Algorithm algorithm) { return algorithm == Algorithm::Rvi ? "rvi" : "ucbvi"; }

Algorithm parse_algorithm(std::string_view name) {
    if (name == "rvi") return Algorithm::Rvi;
    if (name == "ucbvi") return Algorithm::UcbVi;
    throw ModelError("unknown algorithm '" + std::string(name) + "'");
}

namespace {

template <class T, class Convert>
std::vector<T> scalar_or_list(const json& node, Convert convert) {
    std::vector<T> out;
    if (node.is_array()) {
        for (const auto& item : node) out.push_back(convert(item));
    } else {
        out.push_back(convert(node));
    }
    if (out.empty()) throw ModelError("config lists must not be empty");
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    ExperimentConfig cfg;
    try {
        cfg.source = doc;
        cfg.environment = doc.at("environment").get<std::string>();
        if (cfg.environment != "gambler" && cfg.environment != "frozen_lake" && cfg.environment != "hard_instance")
            throw ModelError("unknown environment '" + cfg.environment + "'");
        cfg.env_params = doc.value("env_params", json::object());
        cfg.algorithms = scalar_or_list<Algorithm>(
            doc.at("algorithm"), [](const json& j) { return parse_algorithm(j.get<std::string>()); });
        cfg.divergence = parse_divergence(doc.at("divergence").get<std::string>());
        cfg.sigmas = scalar_or_list<double>(doc.at("sigma"), [](const json& j) {
            const double s = j.get<double>();
            if (!(s >= 0.0)) throw ModelError("sigma must be nonnegative");
            return s;
        });
        cfg.horizons = scalar_or_list<std::size_t>(doc.at("H"), [](const json& j) {
            const auto h = j.get<std::size_t>();
            if (h == 0) throw ModelError("H must be positive");
            return h;
        });
        cfg.episodes = doc.at("K").get<std::size_t>();
        if (cfg.episodes == 0) throw ModelError("K must be positive");
        cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        if (cfg.seeds.empty()) throw ModelError("seeds must not be empty");
        cfg.bonus_preset = parse_bonus_preset(doc.value("bonus_preset", std::string("practical")));
        cfg.failure_prob = doc.value("failure_prob", 0.1);
        if (!(cfg.failure_prob > 0.0 && cfg.failure_prob < 1.0)) throw ModelError("failure_prob must lie in (0,1)");
        cfg.output_dir = doc.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw ModelError(std::string("experiment config: ") + e.what());
    }
    for (auto alg : cfg.algorithms)
        if (alg == Algorithm::Rvi) {
            if (cfg.divergence == DivergenceKind::TV) throw ModelError("rvi supports chi2 and kl only");
            for (double s : cfg.sigmas)
                if (cfg.divergence == DivergenceKind::KL && !(s > 0.0))
                    throw ModelError("rvi with kl needs sigma > 0");
        }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("experiment config: ") + e.what());
    }
    return from_json(doc);
}

std::string ExperimentCell::name(const ExperimentConfig& cfg) const {
    std::ostringstream out;
    out << cfg.environment << '_' << to_string(algorithm) << '_' << to_string(cfg.divergence) << "_sigma"
        << format_double(sigma) << "_H" << horizon;
    return out.str();
}

std::vector<ExperimentCell> expand_cells(const ExperimentConfig& cfg) {
    std::vector<ExperimentCell> cells;
    for (auto alg : cfg.algorithms)
        for (double sigma : cfg.sigmas)
            for (std::size_t h : cfg.horizons) cells.push_back({alg, sigma, h});
    return cells;
}

FiniteRMDP build_environment(const ExperimentConfig& cfg, double sigma, std::size_t horizon) {
    const DivergenceSpec spec(cfg.divergence, sigma);
    const auto& p = cfg.env_params;
    try {
        if (cfg.environment == "gambler") {
            const auto target = p.value("target", std::size_t{20});
            const auto capital = p.value("initial_capital", target / 2);
            return build_gambler(target, horizon, p.value("p_head", 0.6), spec, capital);
        }
        if (cfg.environment == "frozen_lake") {
            if (p.contains("layout")) return build_frozen_lake(p.at("layout").get<LakeLayout>(), horizon, spec);
            const auto side = p.value("grid_side", std::size_t{4});
            if (side == 4) return build_frozen_lake(canonical_lake_4x4(), horizon, spec);
            return build_frozen_lake(random_lake_layout(side, p.value("layout_seed", std::uint64_t{0}),
                                                        p.value("hole_prob", 0.2)),
                                     horizon, spec);
        }
        HardInstanceSpec hard;
        hard.num_actions = p.value("num_actions", std::size_t{2});
        hard.branch_prob = p.value("branch_prob", 0.5);
        hard.horizon = horizon;
        hard.special_action_index = p.value("special_action_index", std::size_t{0});
        hard.base_mean = p.value("base_mean", 0.0);
        hard.boost = p.value("boost", 1.0);
        hard.divergence = spec;
        return build_hard_instance(hard).model;
    } catch (const json::exception& e) {
        throw ModelError(std::string("env_params: ") + e.what());
    }
}

double episode_return_bound(const ExperimentConfig& cfg) {
    if (cfg.env_params.contains("return_bound")) {
        const auto& v = cfg.env_params.at("return_bound");
        if (!v.is_number() || !(v.get<double>() > 0.0)) throw ModelError("env_params.return_bound must be positive");
        return v.get<double>();
    }
    if (cfg.environment == "gambler" || cfg.environment == "frozen_lake") return 1.0;
    return std::numeric_limits<double>::infinity();
}

RunRecord run_cell(const ExperimentConfig& cfg, const ExperimentCell& cell, std::uint64_t seed) {
    const FiniteRMDP env = build_environment(cfg, cell.sigma, cell.horizon);
    const auto agent_cfg = AgentConfig::with_preset(cfg.bonus_preset, env, cfg.episodes, cfg.failure_prob, seed,
                                                    episode_return_bound(cfg));
    const OnlineRun run = cell.algorithm == Algorithm::Rvi ? rvi_run(env, agent_cfg) : ucbvi_run(env, agent_cfg);
    RunRecord record = compute_regret(env, run.policies, agent_cfg.dual_cfg);
    record.seed = seed;
    record.timings["planning"] = run.planning_seconds;
    record.timings["acting"] = run.acting_seconds;
    record.config = {{"environment", cfg.environment},
                     {"env_params", cfg.env_params},
                     {"algorithm", std::string(to_string(cell.algorithm))},
                     {"divergence", std::string(to_string(cfg.divergence))},
                     {"sigma", cell.sigma},
                     {"H", cell.horizon},
                     {"K", cfg.episodes},
                     {"bonus_preset", std::string(to_string(cfg.bonus_preset))},
                     {"failure_prob", cfg.failure_prob},
                     {"seed", seed}};
    return record;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_run_csv(const RunRecord& record, std::ostream& out) {
    out << "episode,gap,cumulative_regret,seed\n";
    for (std::size_t k = 0; k < record.per_episode_gap.size(); ++k)
        out << (k + 1) << ',' << format_double(record.per_episode_gap[k]) << ','
            << format_double(record.cumulative_regret[k]) << ',' << record.seed << '\n';
}

void write_run_csv(const RunRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_run_csv(record, out);
}

void write_aggregate_csv(std::span<const AggregateRow> rows, std::ostream& out) {
    out << "episode,mean_regret,ci_lower,ci_upper,n_seeds\n";
    for (const auto& r : rows)
        out << r.episode << ',' << format_double(r.mean_regret) << ',' << format_double(r.ci_lower) << ','
            << format_double(r.ci_upper) << ',' << r.n_seeds << '\n';
}

void write_aggregate_csv(std::span<const AggregateRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_aggregate_csv(rows, out);
}

namespace {

template <class T>
T parse_field(std::string_view text, const std::filesystem::path& path, std::size_t line) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": malformed field '" +
                                 std::string(text) + "'");
    return value;
}

}  // namespace

std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "episode,mean_regret,ci_lower,ci_upper,n_seeds")
        throw std::runtime_error(path.string() + ": unexpected header");
    std::vector<AggregateRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 5)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields");
        rows.push_back({parse_field<std::size_t>(fields[0], path, lineno), parse_field<double>(fields[1], path, lineno),
                        parse_field<double>(fields[2], path, lineno), parse_field<double>(fields[3], path, lineno),
                        parse_field<std::size_t>(fields[4], path, lineno)});
    }
    return rows;
}

std::size_t worker_threads() {
    if (const char* env = std::getenv("RRL_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::filesystem::path run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto cells = expand_cells(cfg);
    fs::create_directories(cfg.output_dir);

    struct Task {
        std::size_t cell;
        std::size_t seed_index;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) tasks.push_back({c, i});

    std::vector<std::optional<RunRecord>> records(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const auto& task = tasks[t];
            try {
                records[t] = run_cell(cfg, cells[task.cell], cfg.seeds[task.seed_index]);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };
    const std::size_t threads = std::min(worker_threads(), tasks.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    json manifest_cells = json::array();
    bool all_complete = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::string name = cells[c].name(cfg);
        const fs::path dir = cfg.output_dir / name;
        fs::create_directories(dir);
        std::vector<RunRecord> done;
        json files = json::array(), failures = json::array(), timings = json::object();
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            if (tasks[t].cell != c) continue;
            const auto seed = cfg.seeds[tasks[t].seed_index];
            if (!records[t]) {
                failures.push_back({{"seed", seed}, {"error", errors[t]}});
                continue;
            }
            const std::string file = "seed_" + std::to_string(seed) + ".csv";
            write_run_csv(*records[t], dir / file);
            files.push_back(file);
            timings[std::to_string(seed)] = records[t]->timings;
            done.push_back(std::move(*records[t]));
        }
        const bool complete = failures.empty();
        all_complete = all_complete && complete;
        if (!done.empty()) {
            write_aggregate_csv(aggregate_runs(done), dir / "aggregate.csv");
            files.push_back("aggregate.csv");
        }
        manifest_cells.push_back({{"name", name},
                                  {"algorithm", std::string(to_string(cells[c].algorithm))},
                                  {"sigma", cells[c].sigma},
                                  {"H", cells[c].horizon},
                                  {"status", complete ? "complete" : "incomplete"},
                                  {"seeds_completed", done.size()},
                                  {"files", files},
                                  {"failures", failures},
                                  {"wall_clock_seconds", timings}});
    }
    const json manifest{{"config", cfg.source}, {"complete", all_complete}, {"cells", manifest_cells}};
    std::ofstream out(cfg.output_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    return cfg.output_dir;
}

std::filesystem::path run_experiment(const std::filesystem::path& config_path) {
    return run_experiment(ExperimentConfig::load(config_path));
}

}  // namespace rrl
