#pragma once

#include "hybrid/channel.hpp"
#include "hybrid/common.hpp"
#include "hybrid/dnn.hpp"
#include "hybrid/precoder.hpp"
#include "hybrid/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hybrid::simulate {

enum class SchemeId { dnn_hybrid, sgd_hybrid, phase_projection, fully_digital_gmd, fully_digital_svd };

inline constexpr std::array<SchemeId, 5> all_schemes{SchemeId::dnn_hybrid, SchemeId::sgd_hybrid,
                                                     SchemeId::phase_projection, SchemeId::fully_digital_gmd,
                                                     SchemeId::fully_digital_svd};

std::string to_string(SchemeId id);
SchemeId parse_scheme(const std::string& name);

// Gray-mapped unit-energy QPSK: bit pair (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
CVector qpsk_map(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> qpsk_demap(const CVector& symbols);
cplx qpsk_slice(cplx z);

// Noise variance per receive antenna for a given SNR: total transmit power Ns
// over noise variance, sigma^2 = Ns 10^(-snr_db / 10).
double noise_variance(double snr_db, int ns);

// y = B^H H D s + B^H n, n ~ CN(0, noise_sigma^2 I_Nr).
CVector transmit(const channel::ChannelRealization& h, const CMatrix& precoder, const CMatrix& combiner,
                 const CVector& s, double noise_sigma, Rng& rng);

// Back substitution with per-stream QPSK slicing, last stream first.
CVector sic_detect(const CMatrix& q1, const CVector& y);

struct LinkDims {
    int nt = 16;
    int nr = 4;
    int nt_rf = 4;
    int ns = 2;
    int p_nlos = 3;
    double spacing_ratio = 0.5;
    channel::GainModel gains{};
};

struct SchemeContext {
    precoder::FactorizeConfig factorize{};
    const dnn::Mlp* net = nullptr; // required for dnn_hybrid
};

struct Link {
    CMatrix precoder;
    CMatrix combiner;
    std::optional<precoder::HybridFactors> hybrid; // set for the hybrid schemes
};

// Precoder/combiner pair for one channel. Hybrid schemes all use the GMD combiner W1.
Link build_link(SchemeId scheme, const channel::ChannelRealization& h, const LinkDims& dims,
                const SchemeContext& ctx, std::uint64_t factor_seed);

// Draws a channel for trial `index`; rank-deficient draws are redrawn (at most 100 times).
channel::ChannelRealization trial_channel(const LinkDims& dims, std::uint64_t seed, std::uint64_t index);

struct Interval {
    double lo;
    double hi;
};
// Wilson score interval at 95%.
Interval wilson_interval(long errors, long n);

struct CurvePoint {
    double snr_db = 0.0;
    double value = 0.0;
    long trials = 0;
    long errors = 0;
    long bits = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;

    double ci_halfwidth() const { return 0.5 * (ci_hi - ci_lo); }
};

struct CurveSeries {
    SchemeId scheme{};
    std::vector<CurvePoint> points;
};

// Every trial draws its own channel (shared across the SNR grid and across
// schemes for the same seed) and sends one symbol vector per SNR point.
// OpenMP over trials.
CurveSeries ber_curve(SchemeId scheme, std::span<const double> snr_grid, long trials, const LinkDims& dims,
                      std::uint64_t seed, const SchemeContext& ctx);

// log2 det(I + (rho / Ns) Rn^-1 Heff Heff^H), Heff = B^H H D, Rn = sigma^2 B^H B, rho = Ns.
double spectral_efficiency(const channel::ChannelRealization& h, const CMatrix& precoder, const CMatrix& combiner,
                           double snr_db);

// Spectral efficiency averaged over `channels` draws at every SNR point.
CurveSeries se_curve(SchemeId scheme, std::span<const double> snr_grid, long channels, const LinkDims& dims,
                     std::uint64_t seed, const SchemeContext& ctx);

enum class MseMethod { sgd_hybrid, analog_only };
std::string to_string(MseMethod m);

// Best-so-far MSE per iteration for one target; length cfg.max_iters + 1.
std::vector<double> mse_trace(MseMethod method, const CMatrix& r1, int nt_rf, const precoder::FactorizeConfig& cfg);

// Mean of mse_trace over the targets; target i uses seed derive_seed(cfg.seed, factor_init, i).
std::vector<double> mse_vs_iterations(MseMethod method, std::span<const CMatrix> r1s, int nt_rf,
                                      const precoder::FactorizeConfig& cfg);

// First iteration whose value has closed all but `fraction` of the gap between
// curve[0] and the curve's minimum.
int iterations_to_floor(std::span<const double> curve, double fraction = 0.05);

namespace reference {
CurveSeries ber_curve(SchemeId scheme, std::span<const double> snr_grid, long trials, const LinkDims& dims,
                      std::uint64_t seed, const SchemeContext& ctx);
CurveSeries se_curve(SchemeId scheme, std::span<const double> snr_grid, long channels, const LinkDims& dims,
                     std::uint64_t seed, const SchemeContext& ctx);
} // namespace reference

} // namespace hybrid::simulate
