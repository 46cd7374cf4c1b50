#include "hybrid/config.hpp"

#include "hybrid/experiment.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace hybrid::cli {

std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::ber: return "ber";
    case ExperimentKind::se: return "se";
    case ExperimentKind::mse: return "mse";
    case ExperimentKind::gmd_check: return "gmd-check";
    case ExperimentKind::complexity_bench: return "complexity-bench";
    case ExperimentKind::train: return "train";
    }
    return "?";
}

ExperimentKind parse_kind(const std::string& name) {
    for (auto k : {ExperimentKind::ber, ExperimentKind::se, ExperimentKind::mse, ExperimentKind::gmd_check,
                   ExperimentKind::complexity_bench, ExperimentKind::train})
        if (to_string(k) == name) return k;
    throw InvalidInput("unknown experiment kind '" + name + "'");
}

simulate::LinkDims ExperimentConfig::link_dims() const {
    return {nt, nr, nt_rf, ns, p_nlos, spacing_ratio, {los_variance, nlos_variance}};
}

precoder::FactorizeConfig ExperimentConfig::training_config() const {
    precoder::FactorizeConfig f;
    f.learning_rate = learning_rate;
    f.momentum = momentum;
    f.max_iters = max_iters;
    f.tolerance = tolerance;
    f.batch = batch_size;
    f.seed = seed;
    return f;
}

precoder::FactorizeConfig ExperimentConfig::factorize_config() const {
    auto f = training_config();
    f.learning_rate = factor_learning_rate;
    f.max_iters = factor_max_iters;
    f.batch = 1;
    return f;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw InvalidInput("empty list");
    return out;
}

template <typename T>
T parse_number(const std::string& s) {
    T v{};
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw InvalidInput("bad number '" + s + "'");
    return v;
}

template <typename T>
std::string list_to_string(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += format_number(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"kind", [](auto& c, const auto& v) { c.kind = parse_kind(v); }},
        {"nt", [](auto& c, const auto& v) { c.nt = parse_number<int>(v); }},
        {"nr", [](auto& c, const auto& v) { c.nr = parse_number<int>(v); }},
        {"nt_rf", [](auto& c, const auto& v) { c.nt_rf = parse_number<int>(v); }},
        {"nr_rf", [](auto& c, const auto& v) { c.nr_rf = parse_number<int>(v); }},
        {"ns", [](auto& c, const auto& v) { c.ns = parse_number<int>(v); }},
        {"p_nlos", [](auto& c, const auto& v) { c.p_nlos = parse_number<int>(v); }},
        {"spacing_ratio", [](auto& c, const auto& v) { c.spacing_ratio = parse_number<double>(v); }},
        {"los_variance", [](auto& c, const auto& v) { c.los_variance = parse_number<double>(v); }},
        {"nlos_variance", [](auto& c, const auto& v) { c.nlos_variance = parse_number<double>(v); }},
        {"snr_grid_db",
         [](auto& c, const auto& v) {
             c.snr_grid_db.clear();
             for (const auto& x : split_list(v)) c.snr_grid_db.push_back(parse_number<double>(x));
         }},
        {"trials", [](auto& c, const auto& v) { c.trials = parse_number<long>(v); }},
        {"channels", [](auto& c, const auto& v) { c.channels = parse_number<long>(v); }},
        {"seed", [](auto& c, const auto& v) { c.seed = parse_number<std::uint64_t>(v); }},
        {"schemes",
         [](auto& c, const auto& v) {
             c.schemes.clear();
             for (const auto& x : split_list(v)) c.schemes.push_back(simulate::parse_scheme(x));
         }},
        {"threads", [](auto& c, const auto& v) { c.threads = parse_number<int>(v); }},
        {"learning_rate", [](auto& c, const auto& v) { c.learning_rate = parse_number<double>(v); }},
        {"momentum", [](auto& c, const auto& v) { c.momentum = parse_number<double>(v); }},
        {"max_iters", [](auto& c, const auto& v) { c.max_iters = parse_number<int>(v); }},
        {"tolerance", [](auto& c, const auto& v) { c.tolerance = parse_number<double>(v); }},
        {"batch_size", [](auto& c, const auto& v) { c.batch_size = parse_number<int>(v); }},
        {"factor_learning_rate", [](auto& c, const auto& v) { c.factor_learning_rate = parse_number<double>(v); }},
        {"factor_max_iters", [](auto& c, const auto& v) { c.factor_max_iters = parse_number<int>(v); }},
        {"train_samples", [](auto& c, const auto& v) { c.train_samples = parse_number<long>(v); }},
        {"test_fraction", [](auto& c, const auto& v) { c.test_fraction = parse_number<double>(v); }},
        {"noise_sigma", [](auto& c, const auto& v) { c.noise_sigma = parse_number<double>(v); }},
        {"model", [](auto& c, const auto& v) { c.model = v; }},
        {"bench_nt",
         [](auto& c, const auto& v) {
             c.bench_nt.clear();
             for (const auto& x : split_list(v)) c.bench_nt.push_back(parse_number<int>(x));
         }},
        {"bench_reps", [](auto& c, const auto& v) { c.bench_reps = parse_number<int>(v); }},
        {"bench_iters", [](auto& c, const auto& v) { c.bench_iters = parse_number<int>(v); }},
    };
    return table;
}

} // namespace

std::map<std::string, std::string> ExperimentConfig::to_map() const {
    std::vector<std::string> scheme_names;
    for (auto s : schemes) scheme_names.push_back(simulate::to_string(s));
    std::string scheme_list;
    for (std::size_t i = 0; i < scheme_names.size(); ++i) scheme_list += (i ? ", " : "") + scheme_names[i];
    return {
        {"kind", to_string(kind)},
        {"nt", std::to_string(nt)},
        {"nr", std::to_string(nr)},
        {"nt_rf", std::to_string(nt_rf)},
        {"nr_rf", std::to_string(nr_rf)},
        {"ns", std::to_string(ns)},
        {"p_nlos", std::to_string(p_nlos)},
        {"spacing_ratio", format_number(spacing_ratio)},
        {"los_variance", format_number(los_variance)},
        {"nlos_variance", format_number(nlos_variance)},
        {"snr_grid_db", list_to_string(snr_grid_db)},
        {"trials", std::to_string(trials)},
        {"channels", std::to_string(channels)},
        {"seed", std::to_string(seed)},
        {"schemes", scheme_list},
        {"threads", std::to_string(threads)},
        {"learning_rate", format_number(learning_rate)},
        {"momentum", format_number(momentum)},
        {"max_iters", std::to_string(max_iters)},
        {"tolerance", format_number(tolerance)},
        {"batch_size", std::to_string(batch_size)},
        {"factor_learning_rate", format_number(factor_learning_rate)},
        {"factor_max_iters", std::to_string(factor_max_iters)},
        {"train_samples", std::to_string(train_samples)},
        {"test_fraction", format_number(test_fraction)},
        {"noise_sigma", format_number(noise_sigma)},
        {"model", model},
        {"bench_nt", list_to_string(bench_nt)},
        {"bench_reps", std::to_string(bench_reps)},
        {"bench_iters", std::to_string(bench_iters)},
    };
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key", line_no);
        const auto it = setters().find(key);
        if (it == setters().end()) throw ParseError("unknown key '" + key + "'", line_no);
        if (value.empty() && key != "model") throw ParseError("missing value for '" + key + "'", line_no);
        try {
            it->second(cfg, value);
        } catch (const InvalidInput& e) {
            throw ParseError(key + ": " + e.what(), line_no);
        }
    }
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    if (c.nt < 1 || c.nr < 1 || c.ns < 1 || c.nt_rf < 1 || c.nr_rf < 1) fail("all dimensions must be >= 1");
    if (c.ns > c.nt_rf) fail("violates Ns <= Nt_RF (ns=" + std::to_string(c.ns) + ", nt_rf=" + std::to_string(c.nt_rf) + ")");
    if (c.nt_rf > c.nt) fail("violates Nt_RF <= Nt (nt_rf=" + std::to_string(c.nt_rf) + ", nt=" + std::to_string(c.nt) + ")");
    if (c.ns > c.nr_rf) fail("violates Ns <= Nr_RF (ns=" + std::to_string(c.ns) + ", nr_rf=" + std::to_string(c.nr_rf) + ")");
    if (c.nr_rf > c.nr) fail("violates Nr_RF <= Nr (nr_rf=" + std::to_string(c.nr_rf) + ", nr=" + std::to_string(c.nr) + ")");
    if (c.p_nlos < 0) fail("p_nlos must be >= 0");
    if (c.kind != ExperimentKind::gmd_check && c.ns > c.p_nlos + 1)
        fail("ns exceeds the channel rank bound p_nlos + 1");
    if (!(c.spacing_ratio > 0.0)) fail("spacing_ratio must be > 0");
    if (!(c.los_variance > 0.0) || !(c.nlos_variance >= 0.0)) fail("path gain variances must be positive");
    if (c.snr_grid_db.empty()) fail("snr_grid_db must not be empty");
    if (c.trials < 1 || c.channels < 1) fail("trials and channels must be >= 1");
    if (c.schemes.empty()) fail("schemes must not be empty");
    if (c.threads < 0) fail("threads must be >= 0");
    if (!(c.learning_rate >= 0.0) || !(c.factor_learning_rate >= 0.0)) fail("learning rates must be >= 0");
    if (!(c.momentum >= 0.0 && c.momentum < 1.0)) fail("momentum must lie in [0, 1)");
    if (c.max_iters < 0 || c.factor_max_iters < 0) fail("iteration limits must be >= 0");
    if (!(c.tolerance >= 0.0)) fail("tolerance must be >= 0");
    if (c.batch_size < 1) fail("batch_size must be >= 1");
    if (c.train_samples < 1) fail("train_samples must be >= 1");
    if (!(c.test_fraction >= 0.0 && c.test_fraction < 1.0)) fail("test_fraction must lie in [0, 1)");
    if (!(c.noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
    if (c.bench_nt.empty() || c.bench_reps < 1 || c.bench_iters < 1) fail("bench settings must be positive");
    for (int n : c.bench_nt)
        if (n < c.nt_rf) fail("bench_nt entries must be >= nt_rf");
}

} // namespace hybrid::cli
