#pragma once

#include "hybrid/channel.hpp"
#include "hybrid/common.hpp"
#include "hybrid/decomp.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hybrid::precoder {

// Analog (constant modulus, Nt x Nt_RF) and digital (Nt_RF x Ns) precoders.
struct HybridFactors {
    CMatrix analog;
    CMatrix digital;

    CMatrix product() const { return analog * digital; }
};

// Phase parameterization of the analog stage: analog(i, j) = exp(j phases(i, j)) / sqrt(Nt).
struct PhaseFactors {
    RMatrix phases;
    CMatrix digital;

    CMatrix analog() const;
    HybridFactors to_factors() const { return {analog(), digital}; }
};

struct FactorizeConfig {
    double learning_rate = 0.001;
    double momentum = 0.9;
    int max_iters = 45000;
    double tolerance = 1e-7;
    int batch = 1;
    std::uint64_t seed = 0;
    // false freezes the digital stage at its least-squares fit to the initial
    // analog matrix and updates phases only.
    bool update_digital = true;
};

struct FactorizeResult {
    HybridFactors factors;
    // trace[0] is the loss of the initial point; one entry per iteration after that.
    std::vector<double> loss_trace;
    int iterations = 0;
    bool converged = false;
};

struct GmdPrecoding {
    CMatrix precoder; // R1
    CMatrix combiner; // W1
    CMatrix effective; // Q1
};

struct SvdPrecoding {
    CMatrix precoder;
    CMatrix combiner;
    RVector gains;
};

GmdPrecoding fully_digital_gmd(const channel::ChannelRealization& h, int ns);
SvdPrecoding fully_digital_svd(const channel::ChannelRealization& h, int ns);

// Closest constant-modulus matrix (modulus 1/sqrt(rows)) in Frobenius norm.
CMatrix phase_project(const CMatrix& target);

// ||r1 - R_A R_D||_F
double hybrid_loss(const CMatrix& r1, const HybridFactors& hf);

// The three equal expressions of the loss: Frobenius norm, square root of
// trace(E E^H), square root of the sum of squared singular values of E.
struct LossForms {
    double frobenius;
    double trace;
    double singular;
};
LossForms hybrid_loss_forms(const CMatrix& r1, const HybridFactors& hf);

// Scales the digital stage so trace((R_A R_D)(R_A R_D)^H) <= Ns.
HybridFactors power_normalize(HybridFactors hf);

double precoder_mse(const CMatrix& r1, const HybridFactors& hf);
// Mean over an ensemble of (target, factors) pairs.
double precoder_mse(std::span<const CMatrix> r1s, std::span<const HybridFactors> hfs);

// Squared loss ||r1 - A(phases) D||_F^2 and its gradient on the real
// parameterization. grad_digital packs d/dRe in the real part and d/dIm in the
// imaginary part.
struct SquaredLossGradient {
    double value;
    RMatrix grad_phases;
    CMatrix grad_digital;
};
SquaredLossGradient squared_loss_gradient(const CMatrix& r1, const PhaseFactors& pf);

// Random starting point: phases uniform on [0, 2pi), digital entries CN(0, 1/nt_rf).
PhaseFactors initial_factors(int nt, int nt_rf, int ns, std::uint64_t seed);

// Least-squares digital stage for a fixed analog matrix.
CMatrix least_squares_digital(const CMatrix& analog, const CMatrix& r1);

FactorizeResult factorize_sgd(const CMatrix& r1, int nt_rf, const FactorizeConfig& cfg);
FactorizeResult factorize_sgd(const CMatrix& r1, PhaseFactors start, const FactorizeConfig& cfg);

// Baseline: phase-project r1 into the first Ns RF chains, least-squares
// digital stage, remaining chains idle (zero digital rows).
HybridFactors phase_projection_baseline(const CMatrix& r1, int nt_rf);

// Factorizes many targets; target i uses seed derive_seed(cfg.seed, factor_init, i).
// OpenMP over targets.
std::vector<FactorizeResult> factorize_batch(std::span<const CMatrix> r1s, int nt_rf,
                                             const FactorizeConfig& cfg);

namespace reference {
// Serial version of factorize_batch, kept for testing and benchmarks.
std::vector<FactorizeResult> factorize_batch(std::span<const CMatrix> r1s, int nt_rf,
                                             const FactorizeConfig& cfg);
} // namespace reference

} // namespace hybrid::precoder
