#pragma once

#include "hybrid/channel.hpp"
#include "hybrid/common.hpp"
#include "hybrid/precoder.hpp"
#include "hybrid/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hybrid::dnn {

enum class Activation { relu, clamp, linear };
enum class Mode { train, infer };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

struct LayerSpec {
    int width = 1;
    Activation activation = Activation::relu;
    double noise_sigma = 0.0; // additive Gaussian after the activation, training mode only
};

// FC(128) -> FC(400) -> FC(256) -> noise FC(200) -> FC(128) -> FC(64) -> FC(output_dim, clamp)
std::vector<LayerSpec> default_architecture(int input_dim, int output_dim, double noise_sigma = 0.1);

RVector relu(const RVector& x);
RVector clamp_activation(const RVector& x, int ns);
RVector noise_inject(const RVector& x, double sigma, Rng& rng, Mode mode);

// Fully connected network. weights[l] is (width_l x fan_in_l); velocities
// hold the momentum state and start at zero.
struct Mlp {
    int input_dim = 0;
    int clamp_bound = 1; // upper edge of the clamp activation (Ns)
    std::vector<LayerSpec> layers;
    std::vector<RMatrix> weights;
    std::vector<RVector> biases;
    std::vector<RMatrix> vel_weights;
    std::vector<RVector> vel_biases;

    // Zero parameters.
    Mlp(int input_dim, std::vector<LayerSpec> layers, int clamp_bound);
    // Glorot-uniform weights; clamp-layer biases start mid-box at clamp_bound / 2.
    Mlp(int input_dim, std::vector<LayerSpec> layers, int clamp_bound, Rng& rng);

    int output_dim() const { return layers.back().width; }
    std::size_t parameter_count() const;
};

struct ForwardCache {
    std::vector<RVector> inputs; // input to layer l
    std::vector<RVector> pre;    // affine output of layer l
    RVector output;
};

ForwardCache forward(const Mlp& net, const RVector& v, Mode mode, Rng& rng);

struct Gradients {
    std::vector<RMatrix> weights;
    std::vector<RVector> biases;

    static Gradients zeros_like(const Mlp& net);
    Gradients& operator+=(const Gradients& other);
    Gradients& operator*=(double s);
};

Gradients backward(const Mlp& net, const ForwardCache& cache, const RVector& grad_output);

// Momentum step applied to every parameter of the network.
void apply_momentum_step(Mlp& net, const Gradients& grads, double alpha, double epsilon);

// Maps the clamped network output to precoder parameters:
//   [nt * nt_rf phase slots in [0, ns] -> [0, 2pi)] ++ [nt_rf * ns real parts] ++ [nt_rf * ns imag parts],
// digital entries shifted by -ns/2. Column-major within each block.
struct OutputCodec {
    int nt = 0;
    int nt_rf = 0;
    int ns = 0;

    int dim() const { return nt * nt_rf + 2 * nt_rf * ns; }
    precoder::PhaseFactors decode(const RVector& o) const;
    RVector encode(const precoder::PhaseFactors& pf) const;
    // Chain rule from the parameter gradient back to the output vector.
    RVector encode_gradient(const RMatrix& grad_phases, const CMatrix& grad_digital) const;
};

// Re/Im of vec(H) concatenated, scaled to unit RMS. Length 2 nt nr.
RVector channel_features(const CMatrix& h);

enum class Split { train, test };

struct Sample {
    RVector features;
    CMatrix r1;
    channel::ChannelRealization channel;
    Split split = Split::train;
};

struct DatasetSpec {
    int nt = 16;
    int nr = 4;
    int ns = 2;
    int p_nlos = 3;
    double spacing_ratio = 0.5;
    channel::GainModel gains{};
};

struct Dataset {
    std::vector<Sample> samples;
    std::vector<std::size_t> indices(Split split) const;
};

// Each sample: draw paths, build H, GMD target R1. Rank-deficient draws are
// redrawn up to 100 times. The trailing round(size * test_fraction) samples are
// tagged as test.
Dataset build_dataset(const DatasetSpec& spec, std::size_t size, Rng& rng, double test_fraction = 0.0);

struct BatchGradient {
    Gradients grads; // mean over the batch
    double mean_squared_loss = 0.0;
    double mean_loss = 0.0;
};

// Mean squared-loss gradient over samples[idx]. Noise for batch position b is
// drawn from derive_seed(noise_seed, noise_layer, first_key + b). OpenMP over
// fixed-size chunks reduced in chunk order, so the result is independent of
// the thread count.
BatchGradient batch_gradient(const Mlp& net, const OutputCodec& codec, const Dataset& data,
                             std::span<const std::size_t> idx, Mode mode, std::uint64_t noise_seed,
                             std::uint64_t first_key);

namespace reference {
// Sample-by-sample serial version of batch_gradient.
BatchGradient batch_gradient(const Mlp& net, const OutputCodec& codec, const Dataset& data,
                             std::span<const std::size_t> idx, Mode mode, std::uint64_t noise_seed,
                             std::uint64_t first_key);
} // namespace reference

struct TrainResult {
    std::vector<double> history; // mean training loss per epoch
    long iterations = 0;
    bool converged = false;
};

// Minibatch SGD with momentum on the squared hybrid loss. One epoch is
// ceil(n_train / batch) minibatches drawn with replacement; training stops when
// the epoch loss changes by less than tolerance (relative) or after max_iters
// minibatches.
TrainResult train(Mlp& net, const Dataset& data, const OutputCodec& codec, const precoder::FactorizeConfig& cfg);

// Mean loss (inference mode) over one split.
double evaluate(const Mlp& net, const Dataset& data, const OutputCodec& codec, Split split);

// Single forward pass, decode, power normalization.
precoder::HybridFactors infer_precoders(const Mlp& net, const channel::ChannelRealization& h,
                                        const OutputCodec& codec);

void save(const Mlp& net, const std::filesystem::path& path);
Mlp load(const std::filesystem::path& path);
std::string serialize(const Mlp& net);
Mlp deserialize(const std::string& text);

} // namespace hybrid::dnn
