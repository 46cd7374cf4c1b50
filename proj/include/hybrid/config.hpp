#pragma once

#include "hybrid/precoder.hpp"
#include "hybrid/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hybrid::cli {

enum class ExperimentKind { ber, se, mse, gmd_check, complexity_bench, train };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& name);

// Full run description. Defaults are listed in README.md.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ber;

    int nt = 16;
    int nr = 4;
    int nt_rf = 4;
    int nr_rf = 4;
    int ns = 2;
    int p_nlos = 3;
    double spacing_ratio = 0.5;
    double los_variance = 1.0;
    double nlos_variance = 0.1;

    std::vector<double> snr_grid_db{-20, -15, -10, -5, 0, 5, 10};
    long trials = 20000;
    long channels = 100;
    std::uint64_t seed = 1;
    std::vector<simulate::SchemeId> schemes{simulate::SchemeId::fully_digital_gmd, simulate::SchemeId::sgd_hybrid,
                                            simulate::SchemeId::phase_projection};
    int threads = 0;

    // Network training and the MSE-convergence experiment.
    double learning_rate = 0.001;
    double momentum = 0.9;
    int max_iters = 45000;
    double tolerance = 1e-7;
    int batch_size = 20;

    // Per-channel factorization inside ber / se / complexity-bench.
    double factor_learning_rate = 0.1;
    int factor_max_iters = 2000;

    long train_samples = 1000;
    double test_fraction = 0.1;
    double noise_sigma = 0.1;
    std::string model; // optional pre-trained network for dnn_hybrid

    std::vector<int> bench_nt{16, 32, 64};
    int bench_reps = 5;
    int bench_iters = 500;

    simulate::LinkDims link_dims() const;
    precoder::FactorizeConfig training_config() const;
    precoder::FactorizeConfig factorize_config() const;

    // Resolved key/value pairs in the config-file syntax.
    std::map<std::string, std::string> to_map() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// Checks Ns <= Nt_RF <= Nt, Ns <= Nr_RF <= Nr and the scalar ranges.
void validate(const ExperimentConfig& cfg);

} // namespace hybrid::cli
