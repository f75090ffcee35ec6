#include "rrl/environments.hpp"
#include "rrl/experiment.hpp"
#include "rrl/model_io.hpp"
#include "rrl/oracle_check.hpp"
#include "rrl/plot.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override, int threads) {
    auto cfg = rrl::ExperimentConfig::load(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads > 0) setenv("RRL_THREADS", std::to_string(threads).c_str(), 1);
    const auto dir = rrl::run_experiment(cfg);
    std::ifstream in(dir / "manifest.json");
    const auto manifest = nlohmann::json::parse(in);
    for (const auto& cell : manifest["cells"])
        std::cout << cell["name"].get<std::string>() << ": " << cell["status"].get<std::string>() << " ("
                  << cell["seeds_completed"].get<std::size_t>() << " seeds)\n";
    std::cout << "manifest: " << (dir / "manifest.json").string() << '\n';
    return manifest["complete"].get<bool>() ? 0 : 3;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& kind, const std::string& out) {
    std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
    const auto frame = rrl::emit_plot(paths, rrl::parse_plot_kind(kind), out);
    std::cout << "wrote " << out << " (x: [" << frame.x_min << ", " << frame.x_max << "], y: [" << frame.y_min
              << ", " << frame.y_max << "])\n";
    return 0;
}

int cmd_validate(const std::string& path) {
    const auto model = rrl::load_model(path);
    const auto report = rrl::validate_rmdp(model);
    if (report.ok()) {
        std::cout << path << ": ok (S=" << model.num_states() << ", A=" << model.num_actions()
                  << ", H=" << model.horizon() << ")\n";
        return 0;
    }
    for (const auto& v : report.violations) std::cout << path << ": " << v << '\n';
    return 1;
}

int cmd_oracle_check(const std::string& kind, double sigma, rrl::OracleCheckOptions options) {
    const rrl::DivergenceSpec spec(rrl::parse_divergence(kind), sigma);
    const auto report = rrl::run_oracle_check(spec, options);
    std::cout << kind << " sigma=" << sigma << ": " << report.instances - report.failures << '/'
              << report.instances << " within tolerance, worst |dual-oracle|=" << report.worst_abs_error
              << " (" << report.worst_ratio << " of allowed)\n";
    return report.failures == 0 ? 0 : 1;
}

int cmd_export(const std::string& env, std::size_t horizon, const std::string& kind, double sigma,
               std::size_t size, std::uint64_t seed, const std::string& out) {
    const rrl::DivergenceSpec spec(rrl::parse_divergence(kind), sigma);
    rrl::FiniteRMDP model = [&] {
        if (env == "gambler") return rrl::build_gambler(size, horizon, 0.6, spec);
        if (env == "frozen_lake")
            return size == 4 ? rrl::build_frozen_lake(rrl::canonical_lake_4x4(), horizon, spec)
                             : rrl::build_frozen_lake(size, horizon, spec, seed);
        if (env == "hard_instance") {
            rrl::HardInstanceSpec hs;
            hs.num_actions = size;
            hs.horizon = horizon;
            hs.divergence = spec;
            return rrl::build_hard_instance(hs).model;
        }
        throw std::invalid_argument("unknown environment '" + env + "'");
    }();
    rrl::save_model(model, out);
    std::cout << "wrote " << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online distributionally robust RL toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    int threads = 0;
    auto* run = app.add_subcommand("run", "Run an experiment grid from a JSON config");
    run->add_option("config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_override, "Override the output directory");
    run->add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

    std::vector<std::string> plot_inputs;
    std::string plot_kind = "regret", plot_out = "plot.svg";
    auto* plot = app.add_subcommand("plot", "Render aggregate CSVs to an SVG");
    plot->add_option("inputs", plot_inputs, "aggregate.csv files")->required()->check(CLI::ExistingFile);
    plot->add_option("--kind", plot_kind, "regret | epsilon")->check(CLI::IsMember({"regret", "epsilon"}));
    plot->add_option("--out", plot_out, "Output SVG path");

    std::string model_path;
    auto* validate = app.add_subcommand("validate", "Check a model JSON file");
    validate->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);

    std::string oracle_kind = "chi2";
    double oracle_sigma = 0.3;
    rrl::OracleCheckOptions oracle_opts;
    auto* oracle = app.add_subcommand("oracle-check", "Compare the dual solvers with a brute-force primal search");
    oracle->add_option("--kind", oracle_kind, "tv | chi2 | kl")->check(CLI::IsMember({"tv", "chi2", "kl"}));
    oracle->add_option("--sigma", oracle_sigma, "Uncertainty radius")->check(CLI::NonNegativeNumber);
    oracle->add_option("--instances", oracle_opts.instances, "Random instances");
    oracle->add_option("--resolution", oracle_opts.resolution, "Oracle grid step")->check(CLI::Range(1e-4, 0.1));
    oracle->add_option("--seed", oracle_opts.seed, "Instance seed");

    std::string export_env = "gambler", export_kind = "chi2", export_out = "model.json";
    std::size_t export_h = 10, export_size = 10;
    double export_sigma = 0.3;
    std::uint64_t export_seed = 0;
    auto* exporter = app.add_subcommand("export", "Write a built-in environment as a model JSON file");
    exporter->add_option("--env", export_env, "gambler | frozen_lake | hard_instance")
        ->check(CLI::IsMember({"gambler", "frozen_lake", "hard_instance"}));
    exporter->add_option("--size", export_size, "Gambler target, lake side, or hard-instance action count");
    exporter->add_option("-H,--horizon", export_h, "Horizon");
    exporter->add_option("--kind", export_kind, "tv | chi2 | kl")->check(CLI::IsMember({"tv", "chi2", "kl"}));
    exporter->add_option("--sigma", export_sigma, "Uncertainty radius");
    exporter->add_option("--seed", export_seed, "Lake layout seed");
    exporter->add_option("--out", export_out, "Output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_override, threads);
        if (*plot) return cmd_plot(plot_inputs, plot_kind, plot_out);
        if (*validate) return cmd_validate(model_path);
        if (*oracle) return cmd_oracle_check(oracle_kind, oracle_sigma, oracle_opts);
        if (*exporter)
            return cmd_export(export_env, export_h, export_kind, export_sigma, export_size, export_seed, export_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
