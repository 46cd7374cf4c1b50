// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "hybrid/experiment.hpp"
#include "hybrid/simulate.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace hybrid;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Worst constraint violation over every hybrid precoder produced by the suite.
struct ConstraintLog {
    double modulus_dev = 0.0;
    double power_excess = -1e300;
    long checked = 0;

    void add(const precoder::HybridFactors& hf) {
        const double r = 1.0 / std::sqrt(static_cast<double>(hf.analog.rows()));
        modulus_dev = std::max(modulus_dev, (hf.analog.cwiseAbs().array() - r).abs().maxCoeff());
        power_excess = std::max(power_excess, hf.product().squaredNorm() - static_cast<double>(hf.digital.cols()));
        ++checked;
    }
} constraints;

precoder::FactorizeConfig factor_config() {
    precoder::FactorizeConfig cfg;
    cfg.learning_rate = 0.1;
    return cfg;
}

// ---------------------------------------------------------------------------

Outcome gmd_correctness() {
    Rng rng(101);
    std::uniform_int_distribution<int> rows(1, 64), cols(1, 16);
    double orth = 0.0, diag = 0.0, recon = 0.0, lower = 0.0;
    const auto t0 = Clock::now();
    for (int i = 0; i < 500; ++i) {
        const int r = rows(rng), c = cols(rng);
        std::uniform_int_distribution<int> pick(1, std::min({8, r, c}));
        const int ns = pick(rng);
        const CMatrix m = testing::random_complex(rng, r, c);
        const auto f = decomp::gmd(m, ns);
        const CMatrix best = decomp::truncate(decomp::svd(m), ns);
        orth = std::max({orth, testing::orth_dev(f.w1), testing::orth_dev(f.r1)});
        diag = std::max(diag, (f.q1.diagonal().array() - f.sigma_bar).abs().maxCoeff() / f.sigma_bar);
        recon = std::max(recon, (f.w1 * f.q1 * f.r1.adjoint() - best).norm() / best.norm());
        for (int j = 0; j < ns; ++j)
            for (int k = j + 1; k < ns; ++k) lower = std::max(lower, std::abs(f.q1(k, j)) / f.sigma_bar);
    }
    const double secs = seconds_since(t0);
    return {orth <= 1e-10 && diag <= 1e-8 && recon <= 1e-8 && lower <= 1e-12 && secs < 5.0,
            fmt("orth=%.2e diag=%.2e recon=%.2e lower=%.2e time=%.2fs", orth, diag, recon, lower, secs)};
}

Outcome loss_forms() {
    Rng rng(102);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CMatrix r1 = decomp::gmd(channel::random_channel(rng, 16, 4, 3).matrix, 2).r1;
        const auto pf = precoder::initial_factors(16, 4, 2, static_cast<std::uint64_t>(t));
        const auto f = precoder::hybrid_loss_forms(r1, pf.to_factors());
        worst = std::max({worst, std::abs(f.frobenius - f.trace), std::abs(f.frobenius - f.singular),
                          std::abs(f.trace - f.singular)});
    }
    return {worst <= 1e-10, fmt("max disagreement=%.2e over 100 instances", worst)};
}

// Max |fd - analytic| over max |fd|, central differences with step 1e-6.
double factor_gradient_error(const CMatrix& r1, const precoder::PhaseFactors& pf) {
    const auto g = precoder::squared_loss_gradient(r1, pf);
    auto loss = [&](const precoder::PhaseFactors& p) { return (r1 - p.analog() * p.digital).squaredNorm(); };
    const double h = 1e-6;
    double err = 0.0, scale = 0.0;
    auto probe = [&](auto&& bump, double analytic) {
        auto a = pf, b = pf;
        bump(a, h);
        bump(b, -h);
        const double fd = (loss(a) - loss(b)) / (2 * h);
        err = std::max(err, std::abs(fd - analytic));
        scale = std::max(scale, std::abs(fd));
    };
    for (Eigen::Index i = 0; i < pf.phases.size(); ++i)
        probe([i](auto& p, double d) { p.phases(i) += d; }, g.grad_phases(i));
    for (Eigen::Index i = 0; i < pf.digital.size(); ++i) {
        probe([i](auto& p, double d) { p.digital(i) += cplx(d, 0.0); }, g.grad_digital(i).real());
        probe([i](auto& p, double d) { p.digital(i) += cplx(0.0, d); }, g.grad_digital(i).imag());
    }
    return err / scale;
}

double network_gradient_error(std::uint64_t seed) {
    const dnn::DatasetSpec spec{4, 2, 1, 3};
    Rng rng(seed);
    const auto data = dnn::build_dataset(spec, 3, rng);
    const dnn::OutputCodec codec{4, 2, 1};
    Rng wr(seed + 1);
    const dnn::Mlp net(16,
                       {{10, dnn::Activation::relu, 0.0}, {10, dnn::Activation::relu, 0.1},
                        {codec.dim(), dnn::Activation::clamp, 0.0}},
                       1, wr);
    if (net.parameter_count() > 1000) return 1e300;
    const std::vector<std::size_t> idx{0, 1, 2};
    auto loss = [&](const dnn::Mlp& m) {
        return dnn::batch_gradient(m, codec, data, idx, dnn::Mode::infer, 0, 0).mean_squared_loss;
    };
    const auto bg = dnn::batch_gradient(net, codec, data, idx, dnn::Mode::infer, 0, 0);
    const double h = 1e-6;
    double err = 0.0, scale = 0.0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) {
            auto a = net, b = net;
            a.weights[l](i) += h;
            b.weights[l](i) -= h;
            const double fd = (loss(a) - loss(b)) / (2 * h);
            err = std::max(err, std::abs(fd - bg.grads.weights[l](i)));
            scale = std::max(scale, std::abs(fd));
        }
        for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
            auto a = net, b = net;
            a.biases[l][i] += h;
            b.biases[l][i] -= h;
            const double fd = (loss(a) - loss(b)) / (2 * h);
            err = std::max(err, std::abs(fd - bg.grads.biases[l][i]));
            scale = std::max(scale, std::abs(fd));
        }
    }
    return err / scale;
}

Outcome gradient_audit() {
    Rng rng(103);
    double factor = 0.0, network = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const CMatrix r1 = decomp::gmd(channel::random_channel(rng, 16, 4, 3).matrix, 2).r1;
        factor = std::max(factor, factor_gradient_error(r1, precoder::initial_factors(16, 4, 2, s)));
        network = std::max(network, network_gradient_error(200 + s));
    }
    return {factor < 1e-4 && network < 1e-4, fmt("factorization rel err=%.2e network rel err=%.2e", factor, network)};
}

Outcome factorization_quality() {
    const auto t0 = Clock::now();
    const simulate::LinkDims dims;
    auto cfg = factor_config();
    std::vector<double> sgd, base;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CMatrix r1 = precoder::fully_digital_gmd(simulate::trial_channel(dims, 104, s), 2).precoder;
        cfg.seed = s;
        const auto res = precoder::factorize_sgd(r1, 4, cfg);
        const auto pp = precoder::phase_projection_baseline(r1, 4);
        constraints.add(res.factors);
        constraints.add(pp);
        sgd.push_back(precoder::hybrid_loss(r1, res.factors));
        base.push_back(precoder::hybrid_loss(r1, pp));
    }
    Rng rng(105);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    double exact_worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        RMatrix phases(16, 4);
        for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = u(rng);
        const CMatrix a = precoder::PhaseFactors{phases, CMatrix()}.analog();
        Eigen::HouseholderQR<CMatrix> qr(a * testing::random_complex(rng, 4, 2));
        const CMatrix r1 = qr.householderQ() * CMatrix::Identity(16, 2);
        cfg.seed = 1000 + s;
        const auto res = precoder::factorize_sgd(r1, 4, cfg);
        constraints.add(res.factors);
        exact_worst = std::max(exact_worst, precoder::hybrid_loss(r1, res.factors));
    }
    const double secs = seconds_since(t0);
    const double ms = median(sgd), mb = median(base);
    return {ms < mb && exact_worst < 1e-6 && secs < 60.0,
            fmt("median sgd=%.3e baseline=%.3e worst exact=%.3e time=%.1fs", ms, mb, exact_worst, secs)};
}

// Small network trained on generic channels, shared by the BER and constraint checks.
const dnn::Mlp& shared_network() {
    static const dnn::Mlp net = [] {
        const dnn::DatasetSpec spec;
        Rng rng = make_rng(106, streams::dataset);
        const auto data = dnn::build_dataset(spec, 200, rng);
        const dnn::OutputCodec codec{16, 4, 2};
        Rng wr = make_rng(106, streams::weights);
        dnn::Mlp n(128, dnn::default_architecture(128, codec.dim()), 2, wr);
        precoder::FactorizeConfig cfg;
        cfg.max_iters = 500;
        cfg.seed = 106;
        dnn::train(n, data, codec, cfg);
        return n;
    }();
    return net;
}

Outcome constraint_enforcement() {
    const simulate::LinkDims dims;
    simulate::SchemeContext ctx{factor_config(), &shared_network()};
    ctx.factorize.max_iters = 1000;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto h = simulate::trial_channel(dims, 107, t);
        for (auto id : {simulate::SchemeId::sgd_hybrid, simulate::SchemeId::phase_projection,
                        simulate::SchemeId::dnn_hybrid}) {
            const auto link = simulate::build_link(id, h, dims, ctx, t);
            constraints.add(*link.hybrid);
        }
    }
    return {constraints.modulus_dev <= 1e-12 && constraints.power_excess <= 1e-9,
            fmt("%ld precoders, max modulus dev=%.2e max power excess=%.2e", constraints.checked,
                constraints.modulus_dev, constraints.power_excess)};
}

struct BerData {
    std::vector<simulate::CurveSeries> series;
    double seconds = 0.0;
};

const simulate::CurveSeries& find(const BerData& d, simulate::SchemeId id) {
    for (const auto& s : d.series)
        if (s.scheme == id) return s;
    throw std::runtime_error("missing series");
}

Outcome ber_suite() {
    const std::vector<double> grid{-20, -15, -10, -5, 0, 5, 10};
    const simulate::LinkDims dims;
    simulate::SchemeContext ctx{factor_config(), &shared_network()};
    ctx.factorize.max_iters = 1000;
    BerData d;
    const auto t0 = Clock::now();
    for (auto id : simulate::all_schemes) d.series.push_back(simulate::ber_curve(id, grid, 20000, dims, 108, ctx));
    d.seconds = seconds_since(t0);

    std::string detail = fmt("time=%.0fs; ber at -20 dB:", d.seconds);
    bool a = true;
    for (const auto& s : d.series) {
        const auto& p = s.points.front();
        const bool ok = p.ci_lo <= 0.5 && 0.5 <= p.ci_hi;
        a = a && ok;
        detail += fmt(" %s=%.4f[%.4f,%.4f]", simulate::to_string(s.scheme).c_str(), p.value, p.ci_lo, p.ci_hi);
    }
    const auto& gmd = find(d, simulate::SchemeId::fully_digital_gmd).points;
    bool b = true;
    for (std::size_t i = 1; i < gmd.size(); ++i) b = b && gmd[i].ci_lo <= gmd[i - 1].ci_hi;
    const auto& g10 = gmd.back();
    const auto& s10 = find(d, simulate::SchemeId::sgd_hybrid).points.back();
    const auto& p10 = find(d, simulate::SchemeId::phase_projection).points.back();
    const bool c = g10.ci_lo <= s10.ci_hi && s10.ci_lo <= p10.ci_hi;
    detail += fmt("; (a) %s (b) %s (c) %s [10 dB: gmd=%.2e sgd=%.2e pp=%.2e]", a ? "pass" : "fail",
                  b ? "pass" : "fail", c ? "pass" : "fail", g10.value, s10.value, p10.value);
    return {a && b && c && d.seconds < 300.0, detail};
}

Outcome se_ordering() {
    const std::vector<double> grid{-20, -15, -10, -5, 0, 5, 10};
    const simulate::LinkDims dims;
    simulate::SchemeContext ctx{factor_config(), nullptr};
    ctx.factorize.max_iters = 2000;
    const auto svd = simulate::se_curve(simulate::SchemeId::fully_digital_svd, grid, 100, dims, 109, ctx);
    const auto sgd = simulate::se_curve(simulate::SchemeId::sgd_hybrid, grid, 100, dims, 109, ctx);
    const auto pp = simulate::se_curve(simulate::SchemeId::phase_projection, grid, 100, dims, 109, ctx);
    bool order = true, mono = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        order = order && svd.points[i].value >= sgd.points[i].value && sgd.points[i].value >= pp.points[i].value;
        if (i)
            for (const auto* s : {&svd, &sgd, &pp}) mono = mono && s->points[i].value >= s->points[i - 1].value;
    }
    return {order && mono, fmt("at 10 dB svd=%.3f sgd=%.3f pp=%.3f; ordering %s, monotone %s", svd.points.back().value,
                               sgd.points.back().value, pp.points.back().value, order ? "holds" : "broken",
                               mono ? "yes" : "no")};
}

Outcome mse_convergence() {
    const simulate::LinkDims dims;
    precoder::FactorizeConfig cfg; // paper settings: lr 0.001, momentum 0.9, 45000 iterations
    std::vector<double> full, analog;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const CMatrix r1 = precoder::fully_digital_gmd(simulate::trial_channel(dims, 110, s), 2).precoder;
        cfg.seed = derive_seed(110, streams::factor_init, s);
        full.push_back(simulate::iterations_to_floor(simulate::mse_trace(simulate::MseMethod::sgd_hybrid, r1, 4, cfg)));
        analog.push_back(
            simulate::iterations_to_floor(simulate::mse_trace(simulate::MseMethod::analog_only, r1, 4, cfg)));
    }
    const double a = median(full), b = median(analog);
    return {a < b, fmt("median iterations to floor: sgd_hybrid=%.0f analog_only=%.0f", a, b)};
}

fs::path scratch_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("hybrid_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

Outcome complexity_trend() {
    cli::ExperimentConfig c;
    c.kind = cli::ExperimentKind::complexity_bench;
    const auto dir = scratch_dir("bench");
    const auto m = cli::run_experiment(c, dir);
    std::ifstream is(dir / "complexity.csv");
    std::string line;
    std::getline(is, line);
    double ratio = 0.0;
    while (std::getline(is, line)) ratio = std::stod(line.substr(line.rfind(',') + 1));
    fs::remove_all(dir);
    return {ratio > 0.0 && ratio <= 25.0, fmt("%s", m.summary.c_str())};
}

Outcome overfit_one_sample() {
    const dnn::DatasetSpec spec;
    Rng rng = make_rng(111, streams::dataset);
    const auto one = dnn::build_dataset(spec, 1, rng);
    const dnn::OutputCodec codec{16, 4, 2};
    Rng wr = make_rng(111, streams::weights);
    dnn::Mlp net(128, dnn::default_architecture(128, codec.dim()), 2, wr);
    precoder::FactorizeConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.max_iters = 2000;
    cfg.seed = 111;
    const auto r = dnn::train(net, one, codec, cfg);
    const double loss = dnn::evaluate(net, one, codec, dnn::Split::train);
    constraints.add(dnn::infer_precoders(net, one.samples[0].channel, codec));

    Rng srng = make_rng(112, streams::dataset);
    const auto data = dnn::build_dataset(spec, 100, srng);
    bool finite = true;
    std::string sweep;
    auto run = [&](int batch, double lr) {
        Rng w = make_rng(112, streams::weights);
        dnn::Mlp n(128, dnn::default_architecture(128, codec.dim()), 2, w);
        precoder::FactorizeConfig c;
        c.batch = batch;
        c.learning_rate = lr;
        c.max_iters = 100;
        c.seed = 112;
        const auto t = dnn::train(n, data, codec, c);
        bool ok = !t.history.empty();
        for (double h : t.history) ok = ok && std::isfinite(h);
        finite = finite && ok;
        sweep += fmt(" b%d/lr%g=%.3f", batch, lr, t.history.empty() ? NAN : t.history.back());
    };
    for (int b : {10, 20, 50, 100}) run(b, 0.001);
    for (double lr : {0.01, 0.001, 0.0001}) run(20, lr);
    return {loss < 0.05 && r.iterations <= 2000 && finite,
            fmt("single-sample loss=%.4f (last epoch in training mode %.4f) after %ld iterations; sweep:%s", loss,
                r.history.back(), r.iterations, sweep.c_str())};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome determinism() {
    using cli::ExperimentKind;
    bool same = true;
    std::string detail;
    for (auto kind : {ExperimentKind::ber, ExperimentKind::se, ExperimentKind::mse, ExperimentKind::gmd_check,
                      ExperimentKind::train}) {
        cli::ExperimentConfig c;
        c.kind = kind;
        c.trials = 300;
        c.channels = 20;
        c.max_iters = 300;
        c.factor_max_iters = 300;
        c.train_samples = 40;
        c.schemes = {simulate::SchemeId::sgd_hybrid, simulate::SchemeId::phase_projection,
                     simulate::SchemeId::dnn_hybrid};
        const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
        const auto ma = cli::run_experiment(c, a);
        cli::run_experiment(c, b);
        int files = 0;
        for (const auto& f : ma.outputs) {
            if (f.extension() != ".csv") continue;
            ++files;
            same = same && slurp(a / f.filename()) == slurp(b / f.filename());
        }
        detail += fmt(" %s(%d csv)", cli::to_string(kind).c_str(), files);
        fs::remove_all(a);
        fs::remove_all(b);
    }
    return {same, "byte-identical reruns:" + detail};
}

} // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, gmd_correctness},  {2, loss_forms},      {3, gradient_audit},    {4, factorization_quality},
        {6, ber_suite},        {7, se_ordering},     {8, mse_convergence},   {9, complexity_trend},
        {10, overfit_one_sample}, {11, determinism}, {5, constraint_enforcement},
    };
    std::vector<std::pair<int, Outcome>> results;
    for (const auto& [id, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        results.emplace_back(id, o);
        std::fflush(stdout);
    }
    std::sort(results.begin(), results.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    int failed = 0;
    for (const auto& [id, o] : results) {
        std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed ? 1 : 0;
}
