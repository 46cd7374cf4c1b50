#include "hybrid/simulate.hpp"

#include "hybrid/decomp.hpp"
#include "hybrid/omp.hpp"

#include <algorithm>
#include <cmath>

namespace hybrid::simulate {

std::string to_string(SchemeId id) {
    switch (id) {
    case SchemeId::dnn_hybrid: return "dnn_hybrid";
    case SchemeId::sgd_hybrid: return "sgd_hybrid";
    case SchemeId::phase_projection: return "phase_projection";
    case SchemeId::fully_digital_gmd: return "fully_digital_gmd";
    case SchemeId::fully_digital_svd: return "fully_digital_svd";
    }
    return "?";
}

SchemeId parse_scheme(const std::string& name) {
    for (auto id : all_schemes)
        if (to_string(id) == name) return id;
    throw InvalidInput("unknown scheme '" + name + "'");
}

std::string to_string(MseMethod m) { return m == MseMethod::sgd_hybrid ? "sgd_hybrid" : "analog_only"; }

// ---------------------------------------------------------------------------
// Modulation and detection

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

CVector qpsk_map(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) throw InvalidInput("qpsk_map: bit count must be even");
    CVector s(static_cast<Eigen::Index>(bits.size() / 2));
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const auto b0 = bits[2 * static_cast<std::size_t>(k)];
        const auto b1 = bits[2 * static_cast<std::size_t>(k) + 1];
        s[k] = cplx(b0 ? -kInvSqrt2 : kInvSqrt2, b1 ? -kInvSqrt2 : kInvSqrt2);
    }
    return s;
}

std::vector<std::uint8_t> qpsk_demap(const CVector& symbols) {
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(symbols.size()) * 2);
    for (const auto& z : symbols) {
        bits.push_back(z.real() < 0.0 ? 1 : 0);
        bits.push_back(z.imag() < 0.0 ? 1 : 0);
    }
    return bits;
}

cplx qpsk_slice(cplx z) {
    return {z.real() < 0.0 ? -kInvSqrt2 : kInvSqrt2, z.imag() < 0.0 ? -kInvSqrt2 : kInvSqrt2};
}

double noise_variance(double snr_db, int ns) { return ns * std::pow(10.0, -snr_db / 10.0); }

CVector transmit(const channel::ChannelRealization& h, const CMatrix& precoder, const CMatrix& combiner,
                 const CVector& s, double noise_sigma, Rng& rng) {
    const auto& H = h.matrix;
    if (precoder.rows() != H.cols() || combiner.rows() != H.rows() || precoder.cols() != s.size())
        throw InvalidInput("transmit: dimension mismatch");
    const double ns = static_cast<double>(precoder.cols());
    if (precoder.squaredNorm() > ns + 1e-9) throw InvalidInput("transmit: precoder violates the power constraint");
    if (!(noise_sigma >= 0.0)) throw InvalidInput("transmit: noise_sigma must be >= 0");

    CVector r = H * (precoder * s);
    if (noise_sigma > 0.0) {
        std::normal_distribution<double> normal(0.0, noise_sigma * kInvSqrt2);
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            const double re = normal(rng);
            r[i] += cplx(re, normal(rng));
        }
    }
    return combiner.adjoint() * r;
}

CVector sic_detect(const CMatrix& q1, const CVector& y) {
    const auto n = q1.rows();
    if (q1.cols() != n || y.size() != n) throw InvalidInput("sic_detect: dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
        if (q1(i, i) == cplx(0.0, 0.0)) throw InvalidInput("sic_detect: zero on the diagonal");
    CVector s(n);
    for (Eigen::Index i = n; i-- > 0;) {
        cplx acc = y[i];
        for (Eigen::Index j = i + 1; j < n; ++j) acc -= q1(i, j) * s[j];
        s[i] = qpsk_slice(acc / q1(i, i));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Links

channel::ChannelRealization trial_channel(const LinkDims& dims, std::uint64_t seed, std::uint64_t index) {
    Rng rng = make_rng(seed, streams::channel, index);
    for (int attempt = 0;; ++attempt) {
        auto h = channel::random_channel(rng, dims.nt, dims.nr, dims.p_nlos, dims.spacing_ratio, dims.gains);
        const auto sigma = decomp::svd(h.matrix).sigma;
        if (sigma[dims.ns - 1] > 1e-12 * sigma[0]) return h;
        if (attempt + 1 >= 100) throw RankDeficient("trial_channel: could not draw a channel of rank >= ns");
    }
}

Link build_link(SchemeId scheme, const channel::ChannelRealization& h, const LinkDims& dims,
                const SchemeContext& ctx, std::uint64_t factor_seed) {
    if (scheme == SchemeId::fully_digital_svd) {
        auto p = precoder::fully_digital_svd(h, dims.ns);
        return {std::move(p.precoder), std::move(p.combiner), std::nullopt};
    }
    auto g = precoder::fully_digital_gmd(h, dims.ns);
    Link link{CMatrix(), std::move(g.combiner), std::nullopt};
    switch (scheme) {
    case SchemeId::fully_digital_gmd:
        link.precoder = std::move(g.precoder);
        return link;
    case SchemeId::phase_projection:
        link.hybrid = precoder::phase_projection_baseline(g.precoder, dims.nt_rf);
        break;
    case SchemeId::sgd_hybrid: {
        auto cfg = ctx.factorize;
        cfg.seed = factor_seed;
        link.hybrid = precoder::factorize_sgd(g.precoder, dims.nt_rf, cfg).factors;
        break;
    }
    case SchemeId::dnn_hybrid:
        if (!ctx.net) throw InvalidInput("build_link: dnn_hybrid needs a trained network");
        link.hybrid = dnn::infer_precoders(*ctx.net, h, {dims.nt, dims.nt_rf, dims.ns});
        break;
    case SchemeId::fully_digital_svd: break;
    }
    link.precoder = link.hybrid->product();
    return link;
}

Interval wilson_interval(long errors, long n) {
    if (n <= 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(errors) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
    return {errors <= 0 ? 0.0 : std::max(0.0, center - half), errors >= n ? 1.0 : std::min(1.0, center + half)};
}

// ---------------------------------------------------------------------------
// BER

namespace {

void check_curve_args(std::span<const double> snr_grid, long trials, const LinkDims& dims) {
    if (trials < 1) throw InvalidInput("trials must be >= 1");
    if (snr_grid.empty()) throw InvalidInput("SNR grid is empty");
    if (!(dims.ns <= dims.nt_rf && dims.nt_rf <= dims.nt)) throw InvalidInput("requires Ns <= Nt_RF <= Nt");
    if (dims.ns > dims.nr) throw InvalidInput("requires Ns <= Nr");
}

// Bit errors of trial t at every SNR point, written to errors[0..n_snr).
void ber_trial(SchemeId scheme, std::span<const double> snr_grid, const LinkDims& dims, std::uint64_t seed,
               const SchemeContext& ctx, std::uint64_t t, std::span<long> errors) {
    const auto h = trial_channel(dims, seed, t);
    const auto link = build_link(scheme, h, dims, ctx, derive_seed(seed, streams::factor_init, t));
    const CMatrix heff = link.combiner.adjoint() * h.matrix * link.precoder;
    const Eigen::HouseholderQR<CMatrix> qr(heff);
    const CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();

    const std::size_t nbits = 2 * static_cast<std::size_t>(dims.ns);
    std::vector<std::uint8_t> bits(nbits);
    for (std::size_t i = 0; i < snr_grid.size(); ++i) {
        Rng rng = make_rng(seed, streams::noise, t * snr_grid.size() + i);
        std::bernoulli_distribution coin(0.5);
        for (auto& b : bits) b = coin(rng) ? 1 : 0;
        const double sigma = std::sqrt(noise_variance(snr_grid[i], dims.ns));
        const CVector y = transmit(h, link.precoder, link.combiner, qpsk_map(bits), sigma, rng);
        const auto detected = qpsk_demap(sic_detect(r, q.adjoint() * y));
        long e = 0;
        for (std::size_t k = 0; k < nbits; ++k) e += detected[k] != bits[k];
        errors[i] = e;
    }
}

CurveSeries ber_series(SchemeId scheme, std::span<const double> snr_grid, long trials, long bits_per_trial,
                       const std::vector<long>& per_trial) {
    const std::size_t n_snr = snr_grid.size();
    CurveSeries out{scheme, {}};
    for (std::size_t i = 0; i < n_snr; ++i) {
        long e = 0;
        for (long t = 0; t < trials; ++t) e += per_trial[static_cast<std::size_t>(t) * n_snr + i];
        const long bits = trials * bits_per_trial;
        const auto ci = wilson_interval(e, bits);
        out.points.push_back({snr_grid[i], static_cast<double>(e) / static_cast<double>(bits), trials, e, bits,
                              ci.lo, ci.hi});
    }
    return out;
}

} // namespace

CurveSeries ber_curve(SchemeId scheme, std::span<const double> snr_grid, long trials, const LinkDims& dims,
                      std::uint64_t seed, const SchemeContext& ctx) {
    check_curve_args(snr_grid, trials, dims);
    const std::size_t n_snr = snr_grid.size();
    std::vector<long> per_trial(static_cast<std::size_t>(trials) * n_snr, 0);
    ParallelErrors errors;
#pragma omp parallel for schedule(dynamic, 16)
    for (long t = 0; t < trials; ++t) {
        errors.run([&] {
            ber_trial(scheme, snr_grid, dims, seed, ctx, static_cast<std::uint64_t>(t),
                      std::span<long>(per_trial).subspan(static_cast<std::size_t>(t) * n_snr, n_snr));
        });
    }
    errors.rethrow();
    return ber_series(scheme, snr_grid, trials, 2L * dims.ns, per_trial);
}

// ---------------------------------------------------------------------------
// Spectral efficiency

double spectral_efficiency(const channel::ChannelRealization& h, const CMatrix& precoder, const CMatrix& combiner,
                           double snr_db) {
    const auto& H = h.matrix;
    if (precoder.rows() != H.cols() || combiner.rows() != H.rows())
        throw InvalidInput("spectral_efficiency: dimension mismatch");
    const double ns = static_cast<double>(precoder.cols());
    const double sigma2 = noise_variance(snr_db, static_cast<int>(precoder.cols()));
    const CMatrix heff = combiner.adjoint() * H * precoder;
    const CMatrix rn = sigma2 * combiner.adjoint() * combiner;
    // log det(I + c Rn^-1 K) = log det(Rn + c K) - log det(Rn), both Hermitian PD
    const double rho = ns;
    const Eigen::LLT<CMatrix> noise(rn);
    if (noise.info() != Eigen::Success || !(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw InvalidInput("spectral_efficiency: noise covariance is singular");
    const Eigen::LLT<CMatrix> total(rn + (rho / ns) * heff * heff.adjoint());
    if (total.info() != Eigen::Success) throw InvalidInput("spectral_efficiency: factorization failed");
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < rn.rows(); ++i)
        logdet += 2.0 * (std::log(total.matrixLLT()(i, i).real()) - std::log(noise.matrixLLT()(i, i).real()));
    return std::max(0.0, logdet / std::log(2.0));
}

namespace {

void se_channel(SchemeId scheme, std::span<const double> snr_grid, const LinkDims& dims, std::uint64_t seed,
                const SchemeContext& ctx, std::uint64_t c, std::span<double> out) {
    const auto h = trial_channel(dims, seed, c);
    const auto link = build_link(scheme, h, dims, ctx, derive_seed(seed, streams::factor_init, c));
    for (std::size_t i = 0; i < snr_grid.size(); ++i)
        out[i] = spectral_efficiency(h, link.precoder, link.combiner, snr_grid[i]);
}

CurveSeries se_series(SchemeId scheme, std::span<const double> snr_grid, long channels,
                      const std::vector<double>& per_channel) {
    const std::size_t n_snr = snr_grid.size();
    CurveSeries out{scheme, {}};
    for (std::size_t i = 0; i < n_snr; ++i) {
        double sum = 0.0;
        for (long c = 0; c < channels; ++c) sum += per_channel[static_cast<std::size_t>(c) * n_snr + i];
        CurvePoint p;
        p.snr_db = snr_grid[i];
        p.value = sum / static_cast<double>(channels);
        p.trials = channels;
        out.points.push_back(p);
    }
    return out;
}

} // namespace

CurveSeries se_curve(SchemeId scheme, std::span<const double> snr_grid, long channels, const LinkDims& dims,
                     std::uint64_t seed, const SchemeContext& ctx) {
    check_curve_args(snr_grid, channels, dims);
    const std::size_t n_snr = snr_grid.size();
    std::vector<double> per_channel(static_cast<std::size_t>(channels) * n_snr, 0.0);
    ParallelErrors errors;
#pragma omp parallel for schedule(dynamic, 4)
    for (long c = 0; c < channels; ++c) {
        errors.run([&] {
            se_channel(scheme, snr_grid, dims, seed, ctx, static_cast<std::uint64_t>(c),
                       std::span<double>(per_channel).subspan(static_cast<std::size_t>(c) * n_snr, n_snr));
        });
    }
    errors.rethrow();
    return se_series(scheme, snr_grid, channels, per_channel);
}

// ---------------------------------------------------------------------------
// MSE convergence

std::vector<double> mse_trace(MseMethod method, const CMatrix& r1, int nt_rf, const precoder::FactorizeConfig& cfg) {
    auto local = cfg;
    local.update_digital = method == MseMethod::sgd_hybrid;
    const auto res = precoder::factorize_sgd(r1, nt_rf, local);
    std::vector<double> curve(static_cast<std::size_t>(cfg.max_iters) + 1);
    double best = res.loss_trace.front() * res.loss_trace.front();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (i < res.loss_trace.size()) best = std::min(best, res.loss_trace[i] * res.loss_trace[i]);
        curve[i] = best;
    }
    return curve;
}

std::vector<double> mse_vs_iterations(MseMethod method, std::span<const CMatrix> r1s, int nt_rf,
                                      const precoder::FactorizeConfig& cfg) {
    if (r1s.empty()) throw InvalidInput("mse_vs_iterations: empty channel set");
    if (cfg.max_iters < 0) throw InvalidInput("mse_vs_iterations: max_iters must be >= 0");
    std::vector<std::vector<double>> curves(r1s.size());
    const long n = static_cast<long>(r1s.size());
    ParallelErrors errors;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        errors.run([&] {
            auto local = cfg;
            local.seed = derive_seed(cfg.seed, streams::factor_init, static_cast<std::uint64_t>(i));
            curves[static_cast<std::size_t>(i)] = mse_trace(method, r1s[static_cast<std::size_t>(i)], nt_rf, local);
        });
    }
    errors.rethrow();
    std::vector<double> mean(curves.front().size(), 0.0);
    for (const auto& c : curves)
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += c[k];
    for (auto& m : mean) m /= static_cast<double>(curves.size());
    return mean;
}

int iterations_to_floor(std::span<const double> curve, double fraction) {
    if (curve.empty()) return 0;
    const double floor = *std::min_element(curve.begin(), curve.end());
    const double target = floor + fraction * (curve.front() - floor);
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve[i] <= target) return static_cast<int>(i);
    return static_cast<int>(curve.size()) - 1;
}

// ---------------------------------------------------------------------------

namespace reference {

CurveSeries ber_curve(SchemeId scheme, std::span<const double> snr_grid, long trials, const LinkDims& dims,
                      std::uint64_t seed, const SchemeContext& ctx) {
    check_curve_args(snr_grid, trials, dims);
    const std::size_t n_snr = snr_grid.size();
    std::vector<long> per_trial(static_cast<std::size_t>(trials) * n_snr, 0);
    for (long t = 0; t < trials; ++t)
        ber_trial(scheme, snr_grid, dims, seed, ctx, static_cast<std::uint64_t>(t),
                  std::span<long>(per_trial).subspan(static_cast<std::size_t>(t) * n_snr, n_snr));
    return ber_series(scheme, snr_grid, trials, 2L * dims.ns, per_trial);
}

CurveSeries se_curve(SchemeId scheme, std::span<const double> snr_grid, long channels, const LinkDims& dims,
                     std::uint64_t seed, const SchemeContext& ctx) {
    check_curve_args(snr_grid, channels, dims);
    const std::size_t n_snr = snr_grid.size();
    std::vector<double> per_channel(static_cast<std::size_t>(channels) * n_snr, 0.0);
    for (long c = 0; c < channels; ++c)
        se_channel(scheme, snr_grid, dims, seed, ctx, static_cast<std::uint64_t>(c),
                   std::span<double>(per_channel).subspan(static_cast<std::size_t>(c) * n_snr, n_snr));
    return se_series(scheme, snr_grid, channels, per_channel);
}

} // namespace reference

} // namespace hybrid::simulate
