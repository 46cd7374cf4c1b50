// Experiment runner: one subcommand per experiment kind.
//
//   hybridsim <gmd-check|ber|se|mse|train|complexity-bench> --config run.cfg --out results/
//   hybridsim plot --csv results/ber.csv

#include "hybrid/config.hpp"
#include "hybrid/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    using namespace hybrid;

    CLI::App app{"mmWave hybrid precoding experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    const std::vector<std::string> kinds{"gmd-check", "ber", "se", "mse", "train", "complexity-bench"};
    for (const auto& kind : kinds) {
        auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
        sub->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "master seed (overrides the file)");
        sub->add_option("--threads", threads, "OpenMP threads, 0 = auto (overrides the file)");
    }
    std::string csv_path;
    auto* plot = app.add_subcommand("plot", "write a gnuplot script for a CSV produced by an experiment");
    plot->add_option("--csv", csv_path, "CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (plot->parsed()) {
            std::cout << cli::emit_plot_script(csv_path).string() << "\n";
            return 0;
        }
        const auto* sub = app.get_subcommands().front();
        cli::ExperimentConfig cfg = config_path.empty() ? cli::ExperimentConfig{} : cli::parse_config(config_path);
        cfg.kind = cli::parse_kind(sub->get_name());
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        const auto manifest = cli::run_experiment(cfg, out_dir);
        std::cout << manifest.summary << "\n";
        for (const auto& f : manifest.outputs) std::cout << "wrote " << f.string() << "\n";
        std::cout << "wrote " << (std::filesystem::path(out_dir) / "manifest.json").string() << "\n";
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
