#pragma once

#include "hybrid/config.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace hybrid::cli {

struct RunManifest {
    ExperimentConfig config;
    std::string version;
    std::vector<std::pair<std::string, double>> stage_seconds;
    std::vector<std::filesystem::path> outputs;
    std::string summary;

    std::string to_json() const;
};

// Runs one experiment, writing CSV, a plot script and manifest.json into
// out_dir. On failure every file written so far is removed and the error is
// rethrown.
RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Writes <csv stem>.gp next to the CSV: a gnuplot script with a logarithmic
// y axis for BER and MSE data, linear otherwise. Returns the script path.
std::filesystem::path emit_plot_script(const std::filesystem::path& csv_path);

// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

} // namespace hybrid::cli
