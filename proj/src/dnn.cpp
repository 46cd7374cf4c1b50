#include "hybrid/dnn.hpp"

#include "hybrid/decomp.hpp"
#include "hybrid/omp.hpp"
#include "hybrid/optim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hybrid::dnn {

std::string to_string(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::clamp: return "clamp";
    case Activation::linear: return "linear";
    }
    return "?";
}

Activation parse_activation(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "clamp") return Activation::clamp;
    if (name == "linear") return Activation::linear;
    throw InvalidInput("unknown activation '" + name + "'");
}

std::vector<LayerSpec> default_architecture(int input_dim, int output_dim, double noise_sigma) {
    if (input_dim < 1 || output_dim < 1) throw InvalidInput("default_architecture: dimensions must be >= 1");
    return {
        {128, Activation::relu, 0.0},           // input FC
        {400, Activation::relu, 0.0},           // encoder
        {256, Activation::relu, 0.0},
        {200, Activation::relu, noise_sigma},   // noise layer
        {128, Activation::relu, 0.0},           // decoder
        {64, Activation::relu, 0.0},
        {output_dim, Activation::clamp, 0.0},
    };
}

RVector relu(const RVector& x) { return x.cwiseMax(0.0); }

RVector clamp_activation(const RVector& x, int ns) {
    if (ns < 1) throw InvalidInput("clamp_activation: ns must be >= 1");
    return x.cwiseMax(0.0).cwiseMin(static_cast<double>(ns));
}

RVector noise_inject(const RVector& x, double sigma, Rng& rng, Mode mode) {
    if (mode == Mode::infer || sigma == 0.0) return x;
    std::normal_distribution<double> normal(0.0, sigma);
    RVector y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += normal(rng);
    return y;
}

namespace {

void check_layers(int input_dim, const std::vector<LayerSpec>& layers, int clamp_bound) {
    if (input_dim < 1) throw InvalidInput("Mlp: input_dim must be >= 1");
    if (layers.empty()) throw InvalidInput("Mlp: at least one layer is required");
    if (clamp_bound < 1) throw InvalidInput("Mlp: clamp bound must be >= 1");
    for (const auto& l : layers) {
        if (l.width < 1) throw InvalidInput("Mlp: layer width must be >= 1");
        if (!(l.noise_sigma >= 0.0)) throw InvalidInput("Mlp: noise_sigma must be >= 0");
    }
}

template <typename M>
void activate(M& z, Activation a, int bound) {
    switch (a) {
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::clamp: z = z.cwiseMax(0.0).cwiseMin(static_cast<double>(bound)); break;
    case Activation::linear: break;
    }
}

// Derivative of the activation evaluated at the pre-activation value.
inline double activation_slope(double z, Activation a, int bound) {
    switch (a) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::clamp: return (z > 0.0 && z < bound) ? 1.0 : 0.0;
    case Activation::linear: return 1.0;
    }
    return 0.0;
}

} // namespace

Mlp::Mlp(int in, std::vector<LayerSpec> specs, int bound)
    : input_dim(in), clamp_bound(bound), layers(std::move(specs)) {
    check_layers(input_dim, layers, clamp_bound);
    int fan_in = input_dim;
    for (const auto& l : layers) {
        weights.push_back(RMatrix::Zero(l.width, fan_in));
        biases.push_back(RVector::Zero(l.width));
        vel_weights.push_back(RMatrix::Zero(l.width, fan_in));
        vel_biases.push_back(RVector::Zero(l.width));
        fan_in = l.width;
    }
}

Mlp::Mlp(int in, std::vector<LayerSpec> specs, int bound, Rng& rng) : Mlp(in, std::move(specs), bound) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& w = weights[l];
        const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
        if (layers[l].activation == Activation::clamp) biases[l].setConstant(0.5 * clamp_bound);
    }
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

ForwardCache forward(const Mlp& net, const RVector& v, Mode mode, Rng& rng) {
    if (v.size() != net.input_dim) throw InvalidInput("forward: input length does not match the network");
    ForwardCache c;
    c.inputs.reserve(net.layers.size());
    c.pre.reserve(net.layers.size());
    RVector x = v;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& spec = net.layers[l];
        c.inputs.push_back(x);
        RVector z = net.weights[l] * x + net.biases[l];
        c.pre.push_back(z);
        activate(z, spec.activation, net.clamp_bound);
        x = noise_inject(z, spec.noise_sigma, rng, mode);
    }
    c.output = std::move(x);
    return c;
}

Gradients Gradients::zeros_like(const Mlp& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights.push_back(RMatrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
        g.biases.push_back(RVector::Zero(net.biases[l].size()));
    }
    return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += other.weights[l];
        biases[l] += other.biases[l];
    }
    return *this;
}

Gradients& Gradients::operator*=(double s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] *= s;
        biases[l] *= s;
    }
    return *this;
}

Gradients backward(const Mlp& net, const ForwardCache& cache, const RVector& grad_output) {
    if (grad_output.size() != net.output_dim()) throw InvalidInput("backward: gradient length mismatch");
    Gradients g = Gradients::zeros_like(net);
    RVector delta = grad_output;
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const auto& spec = net.layers[l];
        // additive noise passes the gradient through unchanged
        for (Eigen::Index i = 0; i < delta.size(); ++i)
            delta[i] *= activation_slope(cache.pre[l][i], spec.activation, net.clamp_bound);
        g.weights[l].noalias() = delta * cache.inputs[l].transpose();
        g.biases[l] = delta;
        if (l > 0) delta = net.weights[l].transpose() * delta;
    }
    return g;
}

void apply_momentum_step(Mlp& net, const Gradients& grads, double alpha, double epsilon) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        sgd_momentum_step(net.weights[l], grads.weights[l], net.vel_weights[l], alpha, epsilon);
        sgd_momentum_step(net.biases[l], grads.biases[l], net.vel_biases[l], alpha, epsilon);
    }
}

// ---------------------------------------------------------------------------
// Output codec

precoder::PhaseFactors OutputCodec::decode(const RVector& o) const {
    if (o.size() != dim()) throw InvalidInput("OutputCodec::decode: output length mismatch");
    const double to_phase = 2.0 * std::numbers::pi / ns;
    const double shift = 0.5 * ns;
    const int np = nt * nt_rf;
    const int nd = nt_rf * ns;
    precoder::PhaseFactors pf{RMatrix(nt, nt_rf), CMatrix(nt_rf, ns)};
    for (int k = 0; k < np; ++k) pf.phases(k % nt, k / nt) = o[k] * to_phase;
    for (int k = 0; k < nd; ++k)
        pf.digital(k % nt_rf, k / nt_rf) = cplx(o[np + k] - shift, o[np + nd + k] - shift);
    return pf;
}

RVector OutputCodec::encode(const precoder::PhaseFactors& pf) const {
    const double two_pi = 2.0 * std::numbers::pi;
    const double shift = 0.5 * ns;
    const int np = nt * nt_rf;
    const int nd = nt_rf * ns;
    RVector o(dim());
    for (int k = 0; k < np; ++k) {
        double p = std::fmod(pf.phases(k % nt, k / nt), two_pi);
        if (p < 0.0) p += two_pi;
        o[k] = p * ns / two_pi;
    }
    for (int k = 0; k < nd; ++k) {
        const cplx d = pf.digital(k % nt_rf, k / nt_rf);
        o[np + k] = d.real() + shift;
        o[np + nd + k] = d.imag() + shift;
    }
    return o;
}

RVector OutputCodec::encode_gradient(const RMatrix& grad_phases, const CMatrix& grad_digital) const {
    const double to_phase = 2.0 * std::numbers::pi / ns;
    const int np = nt * nt_rf;
    const int nd = nt_rf * ns;
    RVector g(dim());
    for (int k = 0; k < np; ++k) g[k] = grad_phases(k % nt, k / nt) * to_phase;
    for (int k = 0; k < nd; ++k) {
        const cplx d = grad_digital(k % nt_rf, k / nt_rf);
        g[np + k] = d.real();
        g[np + nd + k] = d.imag();
    }
    return g;
}

// ---------------------------------------------------------------------------
// Dataset

RVector channel_features(const CMatrix& h) {
    const Eigen::Index n = h.size();
    RVector f(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        f[k] = h(k).real();
        f[n + k] = h(k).imag();
    }
    const double rms = std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
    if (rms > 0.0) f /= rms;
    return f;
}

std::vector<std::size_t> Dataset::indices(Split split) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].split == split) idx.push_back(i);
    return idx;
}

Dataset build_dataset(const DatasetSpec& spec, std::size_t size, Rng& rng, double test_fraction) {
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
        throw InvalidInput("build_dataset: test_fraction must lie in [0, 1]");
    constexpr int max_redraws = 100;
    Dataset data;
    data.samples.reserve(size);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(size)));
    for (std::size_t i = 0; i < size; ++i) {
        for (int attempt = 0;; ++attempt) {
            auto h = channel::random_channel(rng, spec.nt, spec.nr, spec.p_nlos, spec.spacing_ratio, spec.gains);
            try {
                auto f = decomp::gmd(h.matrix, spec.ns);
                Sample s;
                s.features = channel_features(h.matrix);
                s.r1 = std::move(f.r1);
                s.channel = std::move(h);
                s.split = i + n_test >= size ? Split::test : Split::train;
                data.samples.push_back(std::move(s));
                break;
            } catch (const RankDeficient&) {
                if (attempt + 1 >= max_redraws) throw;
            }
        }
    }
    return data;
}

// ---------------------------------------------------------------------------
// Batch gradients

namespace {

constexpr long kChunk = 8;

struct ChunkResult {
    Gradients grads;
    double sq_loss = 0.0;
    double loss = 0.0;
};

// Batched forward/backward over one chunk; columns are samples.
ChunkResult chunk_gradient(const Mlp& net, const OutputCodec& codec, const Dataset& data,
                           std::span<const std::size_t> idx, Mode mode, std::uint64_t noise_seed,
                           std::uint64_t first_key) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    const std::size_t nl = net.layers.size();
    std::vector<RMatrix> inputs(nl), pre(nl);

    RMatrix x(net.input_dim, m);
    for (Eigen::Index b = 0; b < m; ++b) {
        const auto& f = data.samples[idx[static_cast<std::size_t>(b)]].features;
        if (f.size() != net.input_dim) throw InvalidInput("batch_gradient: feature length mismatch");
        x.col(b) = f;
    }
    std::vector<Rng> rngs;
    if (mode == Mode::train) {
        rngs.reserve(static_cast<std::size_t>(m));
        for (Eigen::Index b = 0; b < m; ++b)
            rngs.push_back(make_rng(noise_seed, streams::noise_layer, first_key + static_cast<std::uint64_t>(b)));
    }

    for (std::size_t l = 0; l < nl; ++l) {
        const auto& spec = net.layers[l];
        inputs[l] = x;
        RMatrix z = net.weights[l] * x;
        z.colwise() += net.biases[l];
        pre[l] = z;
        activate(z, spec.activation, net.clamp_bound);
        if (mode == Mode::train && spec.noise_sigma > 0.0) {
            std::normal_distribution<double> normal(0.0, spec.noise_sigma);
            for (Eigen::Index b = 0; b < m; ++b)
                for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, b) += normal(rngs[static_cast<std::size_t>(b)]);
        }
        x = std::move(z);
    }

    ChunkResult out{Gradients::zeros_like(net)};
    RMatrix delta(net.output_dim(), m);
    for (Eigen::Index b = 0; b < m; ++b) {
        const auto& s = data.samples[idx[static_cast<std::size_t>(b)]];
        const auto lg = precoder::squared_loss_gradient(s.r1, codec.decode(x.col(b)));
        delta.col(b) = codec.encode_gradient(lg.grad_phases, lg.grad_digital);
        out.sq_loss += lg.value;
        out.loss += std::sqrt(lg.value);
    }
    for (std::size_t l = nl; l-- > 0;) {
        const auto& spec = net.layers[l];
        delta.array() *= pre[l].unaryExpr([&](double z) { return activation_slope(z, spec.activation, net.clamp_bound); }).array();
        out.grads.weights[l].noalias() = delta * inputs[l].transpose();
        out.grads.biases[l] = delta.rowwise().sum();
        if (l > 0) delta = net.weights[l].transpose() * delta;
    }
    return out;
}

void check_batch(const Mlp& net, const OutputCodec& codec, const Dataset& data, std::span<const std::size_t> idx) {
    if (idx.empty()) throw InvalidInput("batch_gradient: empty batch");
    if (codec.dim() != net.output_dim()) throw InvalidInput("batch_gradient: codec does not match the network output");
    for (auto i : idx)
        if (i >= data.samples.size()) throw InvalidInput("batch_gradient: sample index out of range");
}

} // namespace

BatchGradient batch_gradient(const Mlp& net, const OutputCodec& codec, const Dataset& data,
                             std::span<const std::size_t> idx, Mode mode, std::uint64_t noise_seed,
                             std::uint64_t first_key) {
    check_batch(net, codec, data, idx);
    const long n = static_cast<long>(idx.size());
    const long chunks = (n + kChunk - 1) / kChunk;
    std::vector<ChunkResult> parts(static_cast<std::size_t>(chunks));
    ParallelErrors errors;
#pragma omp parallel for schedule(static)
    for (long c = 0; c < chunks; ++c) {
        errors.run([&] {
            const long begin = c * kChunk;
            const long len = std::min(kChunk, n - begin);
            parts[static_cast<std::size_t>(c)] =
                chunk_gradient(net, codec, data, idx.subspan(static_cast<std::size_t>(begin), static_cast<std::size_t>(len)),
                               mode, noise_seed, first_key + static_cast<std::uint64_t>(begin));
        });
    }
    errors.rethrow();

    BatchGradient out{std::move(parts[0].grads), parts[0].sq_loss, parts[0].loss};
    for (std::size_t c = 1; c < parts.size(); ++c) {
        out.grads += parts[c].grads;
        out.mean_squared_loss += parts[c].sq_loss;
        out.mean_loss += parts[c].loss;
    }
    const double inv = 1.0 / static_cast<double>(n);
    out.grads *= inv;
    out.mean_squared_loss *= inv;
    out.mean_loss *= inv;
    return out;
}

namespace reference {

BatchGradient batch_gradient(const Mlp& net, const OutputCodec& codec, const Dataset& data,
                             std::span<const std::size_t> idx, Mode mode, std::uint64_t noise_seed,
                             std::uint64_t first_key) {
    check_batch(net, codec, data, idx);
    BatchGradient out{Gradients::zeros_like(net)};
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const auto& s = data.samples[idx[b]];
        Rng rng = make_rng(noise_seed, streams::noise_layer, first_key + b);
        const auto cache = forward(net, s.features, mode, rng);
        const auto lg = precoder::squared_loss_gradient(s.r1, codec.decode(cache.output));
        out.grads += backward(net, cache, codec.encode_gradient(lg.grad_phases, lg.grad_digital));
        out.mean_squared_loss += lg.value;
        out.mean_loss += std::sqrt(lg.value);
    }
    const double inv = 1.0 / static_cast<double>(idx.size());
    out.grads *= inv;
    out.mean_squared_loss *= inv;
    out.mean_loss *= inv;
    return out;
}

} // namespace reference

// ---------------------------------------------------------------------------
// Training and inference

TrainResult train(Mlp& net, const Dataset& data, const OutputCodec& codec, const precoder::FactorizeConfig& cfg) {
    const auto train_idx = data.indices(Split::train);
    if (train_idx.empty()) throw InvalidInput("train: dataset has no training samples");
    if (cfg.batch < 1) throw InvalidInput("train: batch size must be >= 1");
    if (!(cfg.learning_rate >= 0.0) || !(cfg.momentum >= 0.0 && cfg.momentum < 1.0) || cfg.max_iters < 0)
        throw InvalidInput("train: invalid optimizer settings");

    const long per_epoch = std::max<long>(1, (static_cast<long>(train_idx.size()) + cfg.batch - 1) / cfg.batch);
    std::uniform_int_distribution<std::size_t> pick(0, train_idx.size() - 1);
    std::vector<std::size_t> batch(static_cast<std::size_t>(cfg.batch));

    TrainResult out;
    double epoch_loss = 0.0;
    long in_epoch = 0;
    for (long it = 0; it < cfg.max_iters; ++it) {
        Rng rng = make_rng(cfg.seed, streams::batches, static_cast<std::uint64_t>(it));
        for (auto& b : batch) b = train_idx[pick(rng)];
        const auto bg = batch_gradient(net, codec, data, batch, Mode::train, cfg.seed,
                                       static_cast<std::uint64_t>(it) * static_cast<std::uint64_t>(cfg.batch));
        apply_momentum_step(net, bg.grads, cfg.momentum, cfg.learning_rate);
        out.iterations = it + 1;
        epoch_loss += bg.mean_loss;
        if (++in_epoch == per_epoch) {
            const double loss = epoch_loss / static_cast<double>(per_epoch);
            out.history.push_back(loss);
            epoch_loss = 0.0;
            in_epoch = 0;
            if (!std::isfinite(loss)) break;
            const auto n = out.history.size();
            if (n >= 2) {
                const double prev = out.history[n - 2];
                if (std::abs(prev - loss) < cfg.tolerance * prev) {
                    out.converged = true;
                    break;
                }
            }
        }
    }
    if (in_epoch > 0) out.history.push_back(epoch_loss / static_cast<double>(in_epoch));
    return out;
}

double evaluate(const Mlp& net, const Dataset& data, const OutputCodec& codec, Split split) {
    const auto idx = data.indices(split);
    if (idx.empty()) return 0.0;
    return batch_gradient(net, codec, data, idx, Mode::infer, 0, 0).mean_loss;
}

precoder::HybridFactors infer_precoders(const Mlp& net, const channel::ChannelRealization& h,
                                        const OutputCodec& codec) {
    if (codec.nt != h.nt || codec.dim() != net.output_dim())
        throw InvalidInput("infer_precoders: network does not match the channel dimensions");
    const RVector f = channel_features(h.matrix);
    if (f.size() != net.input_dim) throw InvalidInput("infer_precoders: feature length mismatch");
    Rng unused(0);
    const auto cache = forward(net, f, Mode::infer, unused);
    return precoder::power_normalize(codec.decode(cache.output).to_factors());
}

// ---------------------------------------------------------------------------
// Serialization. Text format; doubles use the shortest round-trip form so
// load(save(net)) is bit-exact.

namespace {

constexpr const char* kMagic = "hybrid-mlp";
constexpr int kFormatVersion = 1;

void put(std::ostream& os, double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, r.ptr - buf);
}

double get_double(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw InvalidInput("model file: unexpected end of data");
    double v = 0.0;
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
        throw InvalidInput("model file: bad number '" + tok + "'");
    return v;
}

void expect(std::istream& is, const std::string& word) {
    std::string tok;
    if (!(is >> tok) || tok != word) throw InvalidInput("model file: expected '" + word + "'");
}

long get_int(std::istream& is) {
    long v;
    if (!(is >> v)) throw InvalidInput("model file: expected an integer");
    return v;
}

} // namespace

std::string serialize(const Mlp& net) {
    std::ostringstream os;
    os << kMagic << "\nformat_version " << kFormatVersion << "\ninput_dim " << net.input_dim
       << "\nclamp_bound " << net.clamp_bound << "\nlayers " << net.layers.size() << '\n';
    for (const auto& l : net.layers) {
        os << "layer " << l.width << ' ' << to_string(l.activation) << ' ';
        put(os, l.noise_sigma);
        os << '\n';
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& w = net.weights[l];
        os << "weights " << w.rows() << ' ' << w.cols() << '\n';
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                if (j) os << ' ';
                put(os, w(i, j));
            }
            os << '\n';
        }
        os << "bias " << net.biases[l].size() << '\n';
        for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
            if (i) os << ' ';
            put(os, net.biases[l][i]);
        }
        os << '\n';
    }
    return os.str();
}

Mlp deserialize(const std::string& text) {
    std::istringstream is(text);
    expect(is, kMagic);
    expect(is, "format_version");
    if (get_int(is) != kFormatVersion) throw InvalidInput("model file: unsupported format version");
    expect(is, "input_dim");
    const long input_dim = get_int(is);
    expect(is, "clamp_bound");
    const long bound = get_int(is);
    expect(is, "layers");
    const long n = get_int(is);
    if (n < 1 || n > 1024) throw InvalidInput("model file: bad layer count");
    std::vector<LayerSpec> specs;
    for (long l = 0; l < n; ++l) {
        expect(is, "layer");
        LayerSpec s;
        s.width = static_cast<int>(get_int(is));
        std::string act;
        is >> act;
        s.activation = parse_activation(act);
        s.noise_sigma = get_double(is);
        specs.push_back(s);
    }
    Mlp net(static_cast<int>(input_dim), std::move(specs), static_cast<int>(bound));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& w = net.weights[l];
        expect(is, "weights");
        if (get_int(is) != w.rows() || get_int(is) != w.cols()) throw InvalidInput("model file: weight shape mismatch");
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = get_double(is);
        expect(is, "bias");
        if (get_int(is) != net.biases[l].size()) throw InvalidInput("model file: bias length mismatch");
        for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) net.biases[l][i] = get_double(is);
    }
    return net;
}

void save(const Mlp& net, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot write model file " + path.string());
    os << serialize(net);
    if (!os) throw InvalidInput("failed writing model file " + path.string());
}

Mlp load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot read model file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return deserialize(ss.str());
}

} // namespace hybrid::dnn
