#include "hybrid/experiment.hpp"

#include "hybrid/decomp.hpp"
#include "hybrid/dnn.hpp"
#include "hybrid/omp.hpp"
#include "hybrid/simulate.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace hybrid::cli {

std::string format_number(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["kind"] = to_string(config.kind);
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : config.to_map()) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& [name, secs] : stage_seconds) stages.push_back({{"stage", name}, {"seconds", secs}});
    j["stages"] = stages;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& p : outputs) files.push_back(p.filename().string());
    j["outputs"] = files;
    j["summary"] = summary;
    return j.dump(2) + "\n";
}

namespace {

using Clock = std::chrono::steady_clock;

class Outputs {
public:
    explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path add(const std::string& name) {
        auto p = dir_ / name;
        files_.push_back(p);
        return p;
    }
    void track(const std::filesystem::path& p) { files_.push_back(p); }
    void rollback() noexcept {
        std::error_code ec;
        for (const auto& f : files_) std::filesystem::remove(f, ec);
        std::filesystem::remove(dir_ / "manifest.json.tmp", ec);
    }
    const std::vector<std::filesystem::path>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
};

class StageTimer {
public:
    explicit StageTimer(RunManifest& m) : m_(m) {}
    template <typename Fn>
    auto run(const std::string& name, Fn&& fn) {
        const auto t0 = Clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(name, t0);
        } else {
            auto r = fn();
            record(name, t0);
            return r;
        }
    }

private:
    void record(const std::string& name, Clock::time_point t0) {
        m_.stage_seconds.emplace_back(name, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    RunManifest& m_;
};

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw InvalidInput("cannot write " + p.string());
    os << text;
    if (!os) throw InvalidInput("failed writing " + p.string());
}

class Csv {
public:
    explicit Csv(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += quote(cells[i]);
        }
        text_ += '\n';
    }
    const std::string& text() const { return text_; }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    std::string text_;
};

dnn::DatasetSpec dataset_spec(const ExperimentConfig& c) {
    return {c.nt, c.nr, c.ns, c.p_nlos, c.spacing_ratio, {c.los_variance, c.nlos_variance}};
}

struct Trained {
    dnn::Mlp net;
    dnn::TrainResult result;
    double test_loss;
};

Trained train_network(const ExperimentConfig& c) {
    Rng data_rng = make_rng(c.seed, streams::dataset);
    const auto data = dnn::build_dataset(dataset_spec(c), static_cast<std::size_t>(c.train_samples), data_rng,
                                         c.test_fraction);
    const dnn::OutputCodec codec{c.nt, c.nt_rf, c.ns};
    const int input_dim = 2 * c.nt * c.nr;
    Rng weight_rng = make_rng(c.seed, streams::weights);
    dnn::Mlp net(input_dim, dnn::default_architecture(input_dim, codec.dim(), c.noise_sigma), c.ns, weight_rng);
    auto result = dnn::train(net, data, codec, c.training_config());
    const double test_loss = dnn::evaluate(net, data, codec, dnn::Split::test);
    return {std::move(net), std::move(result), test_loss};
}

std::optional<dnn::Mlp> network_for(const ExperimentConfig& c, StageTimer& timer, Outputs& out) {
    if (std::find(c.schemes.begin(), c.schemes.end(), simulate::SchemeId::dnn_hybrid) == c.schemes.end())
        return std::nullopt;
    if (!c.model.empty()) return timer.run("load-model", [&] { return dnn::load(c.model); });
    auto trained = timer.run("train", [&] { return train_network(c); });
    dnn::save(trained.net, out.add("model.txt"));
    return std::move(trained.net);
}

std::string run_ber(const ExperimentConfig& c, StageTimer& timer, Outputs& out) {
    const auto net = network_for(c, timer, out);
    const simulate::SchemeContext ctx{c.factorize_config(), net ? &*net : nullptr};
    Csv csv{"snr_db", "scheme", "ber", "ci_halfwidth", "trials"};
    for (auto scheme : c.schemes) {
        const auto series = timer.run("ber:" + simulate::to_string(scheme), [&] {
            return simulate::ber_curve(scheme, c.snr_grid_db, c.trials, c.link_dims(), c.seed, ctx);
        });
        for (const auto& p : series.points)
            csv.row({format_number(p.snr_db), simulate::to_string(scheme), format_number(p.value),
                     format_number(p.ci_halfwidth()), std::to_string(p.trials)});
    }
    const auto path = out.add("ber.csv");
    write_text(path, csv.text());
    out.track(emit_plot_script(path));
    return "ber rows=" + std::to_string(c.schemes.size() * c.snr_grid_db.size());
}

std::string run_se(const ExperimentConfig& c, StageTimer& timer, Outputs& out) {
    const auto net = network_for(c, timer, out);
    const simulate::SchemeContext ctx{c.factorize_config(), net ? &*net : nullptr};
    Csv csv{"snr_db", "scheme", "bits_per_s_hz"};
    for (auto scheme : c.schemes) {
        const auto series = timer.run("se:" + simulate::to_string(scheme), [&] {
            return simulate::se_curve(scheme, c.snr_grid_db, c.channels, c.link_dims(), c.seed, ctx);
        });
        for (const auto& p : series.points)
            csv.row({format_number(p.snr_db), simulate::to_string(scheme), format_number(p.value)});
    }
    const auto path = out.add("se.csv");
    write_text(path, csv.text());
    out.track(emit_plot_script(path));
    return "se rows=" + std::to_string(c.schemes.size() * c.snr_grid_db.size());
}

std::vector<CMatrix> gmd_targets(const ExperimentConfig& c) {
    std::vector<CMatrix> r1s;
    for (long i = 0; i < c.channels; ++i) {
        const auto h = simulate::trial_channel(c.link_dims(), c.seed, static_cast<std::uint64_t>(i));
        r1s.push_back(decomp::gmd(h.matrix, c.ns).r1);
    }
    return r1s;
}

std::string run_mse(const ExperimentConfig& c, StageTimer& timer, Outputs& out) {
    const auto r1s = timer.run("targets", [&] { return gmd_targets(c); });
    Csv csv{"iteration", "scheme", "mse"};
    std::ostringstream summary;
    for (auto method : {simulate::MseMethod::sgd_hybrid, simulate::MseMethod::analog_only}) {
        const auto curve = timer.run("mse:" + simulate::to_string(method), [&] {
            return simulate::mse_vs_iterations(method, r1s, c.nt_rf, c.training_config());
        });
        for (std::size_t i = 0; i < curve.size(); ++i)
            csv.row({std::to_string(i), simulate::to_string(method), format_number(curve[i])});
        summary << simulate::to_string(method) << "_iters_to_floor=" << simulate::iterations_to_floor(curve)
                << " " << simulate::to_string(method) << "_final_mse=" << format_number(curve.back()) << " ";
    }
    const auto path = out.add("mse.csv");
    write_text(path, csv.text());
    out.track(emit_plot_script(path));
    auto s = summary.str();
    s.pop_back();
    return s;
}

std::string run_gmd_check(const ExperimentConfig& c, StageTimer& timer, Outputs& out) {
    Csv csv{"index", "rows", "cols", "ns", "diag_dev", "orth_dev", "recon_err"};
    double max_diag = 0.0, max_orth = 0.0, max_recon = 0.0;
    timer.run("gmd", [&] {
        Rng rng = make_rng(c.seed, streams::channel);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        for (long i = 0; i < c.channels; ++i) {
            CMatrix m(c.nr, c.nt);
            for (Eigen::Index k = 0; k < m.size(); ++k) {
                const double re = normal(rng);
                m(k) = cplx(re, normal(rng));
            }
            const auto f = decomp::gmd(m, c.ns);
            const auto s = decomp::svd(m);
            const CMatrix best = decomp::truncate(s, c.ns);
            const double diag = (f.q1.diagonal().real().array() - f.sigma_bar).abs().maxCoeff() / f.sigma_bar;
            const CMatrix eye = CMatrix::Identity(c.ns, c.ns);
            const double orth = std::max((f.w1.adjoint() * f.w1 - eye).norm(), (f.r1.adjoint() * f.r1 - eye).norm());
            const double recon = (f.w1 * f.q1 * f.r1.adjoint() - best).norm() / best.norm();
            max_diag = std::max(max_diag, diag);
            max_orth = std::max(max_orth, orth);
            max_recon = std::max(max_recon, recon);
            csv.row({std::to_string(i), std::to_string(c.nr), std::to_string(c.nt), std::to_string(c.ns),
                     format_number(diag), format_number(orth), format_number(recon)});
        }
    });
    write_text(out.add("gmd_check.csv"), csv.text());
    return "max_diag_dev=" + format_number(max_diag) + " max_orth_dev=" + format_number(max_orth) +
           " max_recon_err=" + format_number(max_recon);
}

std::string run_complexity(const ExperimentConfig& c, StageTimer& timer, Outputs& out) {
    Csv csv{"nt", "median_seconds", "ratio_to_first"};
    std::vector<double> medians;
    auto fcfg = c.factorize_config();
    fcfg.max_iters = c.bench_iters;
    fcfg.tolerance = 0.0; // fixed work per run
    for (int nt : c.bench_nt) {
        auto dims = c.link_dims();
        dims.nt = nt;
        const double median = timer.run("bench:nt=" + std::to_string(nt), [&] {
            std::vector<double> secs;
            for (int r = 0; r < c.bench_reps; ++r) {
                const auto h = simulate::trial_channel(dims, c.seed, static_cast<std::uint64_t>(r));
                const auto g = decomp::gmd(h.matrix, c.ns);
                auto local = fcfg;
                local.seed = derive_seed(c.seed, streams::factor_init, static_cast<std::uint64_t>(r));
                const auto t0 = Clock::now();
                const auto res = precoder::factorize_sgd(g.r1, c.nt_rf, local);
                secs.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
                (void)res;
            }
            std::sort(secs.begin(), secs.end());
            const auto n = secs.size();
            return n % 2 ? secs[n / 2] : 0.5 * (secs[n / 2 - 1] + secs[n / 2]);
        });
        medians.push_back(median);
        csv.row({std::to_string(nt), format_number(median), format_number(median / medians.front())});
    }
    write_text(out.add("complexity.csv"), csv.text());
    return "time_ratio=" + format_number(medians.back() / medians.front()) + " (nt " +
           std::to_string(c.bench_nt.back()) + " vs " + std::to_string(c.bench_nt.front()) + ")";
}

std::string run_train(const ExperimentConfig& c, StageTimer& timer, Outputs& out) {
    auto trained = timer.run("train", [&] { return train_network(c); });
    dnn::save(trained.net, out.add("model.txt"));
    Csv csv{"epoch", "loss"};
    for (std::size_t e = 0; e < trained.result.history.size(); ++e)
        csv.row({std::to_string(e + 1), format_number(trained.result.history[e])});
    const auto path = out.add("train.csv");
    write_text(path, csv.text());
    out.track(emit_plot_script(path));
    return "iterations=" + std::to_string(trained.result.iterations) +
           " final_train_loss=" + format_number(trained.result.history.empty() ? 0.0 : trained.result.history.back()) +
           " test_loss=" + format_number(trained.test_loss) + (trained.result.converged ? " converged" : "");
}

} // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    validate(cfg);
    std::filesystem::create_directories(out_dir);
    set_thread_count(cfg.threads);

    RunManifest manifest;
    manifest.config = cfg;
    manifest.version = HYBRID_VERSION;
    StageTimer timer(manifest);
    Outputs out(out_dir);
    try {
        switch (cfg.kind) {
        case ExperimentKind::ber: manifest.summary = run_ber(cfg, timer, out); break;
        case ExperimentKind::se: manifest.summary = run_se(cfg, timer, out); break;
        case ExperimentKind::mse: manifest.summary = run_mse(cfg, timer, out); break;
        case ExperimentKind::gmd_check: manifest.summary = run_gmd_check(cfg, timer, out); break;
        case ExperimentKind::complexity_bench: manifest.summary = run_complexity(cfg, timer, out); break;
        case ExperimentKind::train: manifest.summary = run_train(cfg, timer, out); break;
        }
        manifest.outputs = out.files();
        const auto tmp = out_dir / "manifest.json.tmp";
        write_text(tmp, manifest.to_json());
        std::filesystem::rename(tmp, out_dir / "manifest.json");
    } catch (...) {
        out.rollback();
        throw;
    }
    return manifest;
}

std::filesystem::path emit_plot_script(const std::filesystem::path& csv_path) {
    std::ifstream is(csv_path);
    if (!is) throw InvalidInput("emit_plot_script: cannot read " + csv_path.string());
    std::string header;
    if (!std::getline(is, header) || header.empty()) throw InvalidInput("emit_plot_script: CSV has no header");
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    auto has = [&](const std::string& name) { return std::find(cols.begin(), cols.end(), name) != cols.end(); };

    const std::string x = cols.front();
    std::string y = cols.size() > 1 ? cols[1] : cols[0];
    for (const char* metric : {"ber", "bits_per_s_hz", "mse", "loss", "median_seconds", "diag_dev"})
        if (has(metric)) {
            y = metric;
            break;
        }
    const bool log_y = y == "ber" || y == "mse" || y == "loss";

    // group rows by the scheme column, in first-appearance order
    std::vector<std::string> groups;
    if (has("scheme")) {
        const auto scheme_col = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "scheme") - cols.begin());
        std::set<std::string> seen;
        std::string line;
        while (std::getline(is, line)) {
            std::stringstream ss(line);
            std::string cell;
            for (std::size_t i = 0; std::getline(ss, cell, ','); ++i)
                if (i == scheme_col && seen.insert(cell).second) groups.push_back(cell);
        }
    }

    const std::string data = csv_path.filename().string();
    auto script_path = csv_path;
    script_path.replace_extension(".gp");
    auto png = csv_path.filename();
    png.replace_extension(".png");

    std::ostringstream gp;
    gp << "# gnuplot script for " << data << "\n"
       << "set datafile separator \",\"\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output \"" << png.string() << "\"\n"
       << "set xlabel \"" << x << "\"\n"
       << "set ylabel \"" << y << "\"\n"
       << "set grid\n";
    if (log_y) gp << "set logscale y\n";
    if (groups.empty()) {
        gp << "plot \"" << data << "\" using (column(\"" << x << "\")):(column(\"" << y
           << "\")) with linespoints title \"" << y << "\"\n";
    } else {
        gp << "plot";
        for (std::size_t g = 0; g < groups.size(); ++g) {
            gp << (g ? ", \\\n     " : " ") << '"' << data << "\" using (column(\"" << x << "\")):(strcol(\"scheme\") eq \""
               << groups[g] << "\" ? column(\"" << y << "\") : 1/0) with linespoints title \"" << groups[g] << '"';
        }
        gp << "\n";
    }
    write_text(script_path, gp.str());
    return script_path;
}

} // namespace hybrid::cli
