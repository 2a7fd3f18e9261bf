#include "goldlab/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "goldlab/kernels.hpp"

namespace goldlab::nn {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::LeakyRelu: return "leaky-relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Softmax: return "softmax";
        case Activation::Tanh: return "tanh";
    }
    return "?";
}

double clamp_prob(double p) {
    return std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
}

double safe_log(double p) { return std::log(clamp_prob(p)); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void softmax_rows(Tensor2D& logits) {
    for (std::size_t r = 0; r < logits.rows; ++r) {
        auto row = logits.row(r);
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : row) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
}

// --- layer construction ----------------------------------------------------

DenseLayer make_dense(Rng& rng, std::size_t in, std::size_t out, Activation act,
                      bool spectral) {
    DenseLayer layer;
    layer.weights = Tensor2D(out, in);
    layer.bias.assign(out, 0.0);
    layer.activation = act;
    const bool relu_family = act == Activation::Relu || act == Activation::LeakyRelu;
    const double scale = relu_family ? std::sqrt(2.0 / static_cast<double>(in))
                                     : std::sqrt(1.0 / static_cast<double>(in));
    for (double& w : layer.weights.data) w = scale * rng.normal();
    layer.spectral = spectral;
    if (spectral) {
        layer.sn_u.resize(out);
        double norm2 = 0.0;
        for (double& u : layer.sn_u) {
            u = rng.normal();
            norm2 += u * u;
        }
        const double inv = 1.0 / std::sqrt(std::max(norm2, 1e-300));
        for (double& u : layer.sn_u) u *= inv;
    }
    return layer;
}

DenseLayer make_dense_zero(std::size_t in, std::size_t out, Activation act) {
    DenseLayer layer;
    layer.weights = Tensor2D(out, in);
    layer.bias.assign(out, 0.0);
    layer.activation = act;
    return layer;
}

// --- spectral normalization --------------------------------------------------

namespace {
constexpr double kSigmaFloor = 1e-12;

double normalize_vec(std::vector<double>& v) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (norm > 0.0) {
        const double inv = 1.0 / norm;
        for (double& x : v) x *= inv;
    }
    return norm;
}
}  // namespace

double spectral_sigma(const DenseLayer& layer, std::vector<double>* v_out) {
    const auto& k = kernels::active();
    const std::size_t out = layer.out_dim();
    const std::size_t in = layer.in_dim();
    std::vector<double> v(in, 0.0);
    // v = W^T u  (1 x out times [out x in])
    k.matmul_nn(layer.sn_u.data(), layer.weights.ptr(), v.data(), 1, out, in);
    const double sigma = normalize_vec(v);
    if (v_out) *v_out = std::move(v);
    return sigma;
}

void power_iterate(DenseLayer& layer, int iterations) {
    if (!layer.spectral) return;
    if (iterations < 1) throw StateError("power_iterate: iterations must be >= 1");
    const auto& k = kernels::active();
    const std::size_t out = layer.out_dim();
    const std::size_t in = layer.in_dim();
    std::vector<double> v(in);
    for (int it = 0; it < iterations; ++it) {
        k.matmul_nn(layer.sn_u.data(), layer.weights.ptr(), v.data(), 1, out, in);
        if (normalize_vec(v) == 0.0) return;  // zero matrix: direction undefined, keep u
        // u = normalize(W v): [out x in] times v
        k.matmul_nt(v.data(), layer.weights.ptr(), layer.sn_u.data(), 1, in, out);
        normalize_vec(layer.sn_u);
    }
}

Tensor2D effective_weights(const DenseLayer& layer) {
    if (!layer.spectral) return layer.weights;
    const double sigma = std::max(spectral_sigma(layer), kSigmaFloor);
    Tensor2D eff = layer.weights;
    const double inv = 1.0 / sigma;
    for (double& w : eff.data) w *= inv;
    return eff;
}

Tensor2D spectral_normalize(DenseLayer& layer, int iterations) {
    power_iterate(layer, iterations);
    return effective_weights(layer);
}

// --- network -----------------------------------------------------------------

Network::Network(std::vector<DenseLayer> layers) {
    for (auto& l : layers) append(std::move(l));
}

void Network::append(DenseLayer layer) {
    if (!layers_.empty() && layers_.back().out_dim() != layer.in_dim())
        throw DimensionError("layer " + std::to_string(layers_.size()) + " expects input dim " +
                             std::to_string(layer.in_dim()) + " but previous layer emits " +
                             std::to_string(layers_.back().out_dim()));
    layers_.push_back(std::move(layer));
}

std::size_t Network::in_dim() const {
    if (layers_.empty()) throw StateError("empty network");
    return layers_.front().in_dim();
}

std::size_t Network::out_dim() const {
    if (layers_.empty()) throw StateError("empty network");
    return layers_.back().out_dim();
}

namespace {

void apply_activation(Activation act, const Tensor2D& pre, Tensor2D& out) {
    const auto& k = kernels::active();
    switch (act) {
        case Activation::Identity:
            out = pre;
            break;
        case Activation::Relu:
            out = Tensor2D(pre.rows, pre.cols);
            k.leaky_relu_fwd(pre.ptr(), out.ptr(), pre.size(), 0.0);
            break;
        case Activation::LeakyRelu:
            out = Tensor2D(pre.rows, pre.cols);
            k.leaky_relu_fwd(pre.ptr(), out.ptr(), pre.size(), kLeakySlope);
            break;
        case Activation::Sigmoid:
            out = Tensor2D(pre.rows, pre.cols);
            for (std::size_t i = 0; i < pre.size(); ++i) out.data[i] = sigmoid(pre.data[i]);
            break;
        case Activation::Softmax:
            out = pre;
            softmax_rows(out);
            break;
        case Activation::Tanh:
            out = Tensor2D(pre.rows, pre.cols);
            for (std::size_t i = 0; i < pre.size(); ++i) out.data[i] = std::tanh(pre.data[i]);
            break;
    }
}

// d_pre from d_out given the cached pre/post activations.
Tensor2D activation_backward(Activation act, const LayerCache& cache, const Tensor2D& d_out) {
    const auto& k = kernels::active();
    Tensor2D d_pre(d_out.rows, d_out.cols);
    switch (act) {
        case Activation::Identity:
            d_pre = d_out;
            break;
        case Activation::Relu:
            k.leaky_relu_bwd(cache.pre.ptr(), d_out.ptr(), d_pre.ptr(), d_out.size(), 0.0);
            break;
        case Activation::LeakyRelu:
            k.leaky_relu_bwd(cache.pre.ptr(), d_out.ptr(), d_pre.ptr(), d_out.size(),
                             kLeakySlope);
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < d_out.size(); ++i) {
                const double y = cache.out.data[i];
                d_pre.data[i] = d_out.data[i] * y * (1.0 - y);
            }
            break;
        case Activation::Softmax:
            for (std::size_t r = 0; r < d_out.rows; ++r) {
                auto y = cache.out.row(r);
                auto g = d_out.row(r);
                double dotgy = 0.0;
                for (std::size_t j = 0; j < y.size(); ++j) dotgy += g[j] * y[j];
                auto dz = d_pre.row(r);
                for (std::size_t j = 0; j < y.size(); ++j) dz[j] = y[j] * (g[j] - dotgy);
            }
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < d_out.size(); ++i) {
                const double y = cache.out.data[i];
                d_pre.data[i] = d_out.data[i] * (1.0 - y * y);
            }
            break;
    }
    return d_pre;
}

}  // namespace

Tensor2D Network::forward(const Tensor2D& input, ForwardCache* cache) const {
    if (layers_.empty()) throw StateError("empty network");
    if (input.cols != in_dim())
        throw DimensionError("forward: input has " + std::to_string(input.cols) +
                             " cols but layer 0 (" + activation_name(layers_[0].activation) +
                             ") expects " + std::to_string(in_dim()));
    const auto& k = kernels::active();
    if (cache) {
        cache->layers.assign(layers_.size(), LayerCache{});
        cache->valid = true;
    }
    Tensor2D x = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const DenseLayer& layer = layers_[i];
        const std::size_t batch = x.rows;
        Tensor2D pre(batch, layer.out_dim());
        double sigma = 1.0;
        std::vector<double> v;
        if (layer.spectral) {
            sigma = std::max(spectral_sigma(layer, &v), kSigmaFloor);
            Tensor2D eff = layer.weights;
            const double inv = 1.0 / sigma;
            for (double& w : eff.data) w *= inv;
            k.matmul_nt(x.ptr(), eff.ptr(), pre.ptr(), batch, layer.in_dim(), layer.out_dim());
        } else {
            k.matmul_nt(x.ptr(), layer.weights.ptr(), pre.ptr(), batch, layer.in_dim(),
                        layer.out_dim());
        }
        k.add_bias_rows(pre.ptr(), layer.bias.data(), batch, layer.out_dim());
        Tensor2D out;
        apply_activation(layer.activation, pre, out);
        if (cache) {
            LayerCache& lc = cache->layers[i];
            lc.input = std::move(x);
            lc.pre = std::move(pre);
            lc.out = out;
            lc.sigma = sigma;
            lc.sn_v = std::move(v);
        }
        x = std::move(out);
    }
    ensure_finite(x, "network forward output");
    return x;
}

NetGrads Network::backward_impl(const ForwardCache& cache, const Tensor2D& seed,
                                bool seed_is_logits, Tensor2D* d_input) const {
    if (!cache.valid || cache.layers.size() != layers_.size())
        throw StateError("backward called without a matching forward cache");
    const auto& k = kernels::active();
    NetGrads grads = zero_grads();
    Tensor2D d_out = seed;
    for (std::size_t idx = layers_.size(); idx-- > 0;) {
        const DenseLayer& layer = layers_[idx];
        const LayerCache& lc = cache.layers[idx];
        if (lc.out.rows != d_out.rows || lc.out.cols != d_out.cols)
            throw DimensionError("backward: gradient shape mismatch at layer " +
                                 std::to_string(idx));
        const bool skip_act = seed_is_logits && idx == layers_.size() - 1;
        Tensor2D d_pre =
            skip_act ? std::move(d_out) : activation_backward(layer.activation, lc, d_out);
        const std::size_t batch = lc.input.rows;
        LayerGrads& lg = grads.layers[idx];
        // dW_eff = dZ^T X
        k.matmul_tn(d_pre.ptr(), lc.input.ptr(), lg.d_weights.ptr(), layer.out_dim(), batch,
                    layer.in_dim());
        k.col_sums(d_pre.ptr(), lg.d_bias.data(), batch, layer.out_dim());
        if (layer.spectral) {
            // W_eff = W / sigma with sigma = ||W^T u||, so
            // dW = (dW_eff - <dW_eff, W_eff> u v^T) / sigma.
            const double inv_sigma = 1.0 / lc.sigma;
            double inner = 0.0;
            for (std::size_t j = 0; j < lg.d_weights.size(); ++j)
                inner += lg.d_weights.data[j] * layer.weights.data[j];
            inner *= inv_sigma;  // <dW_eff, W_eff>
            for (std::size_t r = 0; r < layer.out_dim(); ++r) {
                const double ur = layer.sn_u[r];
                auto wrow = lg.d_weights.row(r);
                for (std::size_t c = 0; c < layer.in_dim(); ++c)
                    wrow[c] = (wrow[c] - inner * ur * lc.sn_v[c]) * inv_sigma;
            }
        }
        const bool need_dx = idx > 0 || d_input != nullptr;
        if (need_dx) {
            Tensor2D dx(batch, layer.in_dim());
            if (layer.spectral) {
                Tensor2D eff = layer.weights;
                const double inv = 1.0 / lc.sigma;
                for (double& w : eff.data) w *= inv;
                k.matmul_nn(d_pre.ptr(), eff.ptr(), dx.ptr(), batch, layer.out_dim(),
                            layer.in_dim());
            } else {
                k.matmul_nn(d_pre.ptr(), layer.weights.ptr(), dx.ptr(), batch, layer.out_dim(),
                            layer.in_dim());
            }
            d_out = std::move(dx);
        }
    }
    if (d_input) *d_input = std::move(d_out);
    return grads;
}

NetGrads Network::backward(const ForwardCache& cache, const Tensor2D& d_out,
                           Tensor2D* d_input) const {
    return backward_impl(cache, d_out, false, d_input);
}

NetGrads Network::backward_from_logits(const ForwardCache& cache, const Tensor2D& d_logits,
                                       Tensor2D* d_input) const {
    return backward_impl(cache, d_logits, true, d_input);
}

void Network::power_iterate_spectral(int iterations) {
    for (auto& layer : layers_)
        if (layer.spectral) power_iterate(layer, iterations);
}

NetGrads Network::zero_grads() const {
    NetGrads g;
    g.layers.reserve(layers_.size());
    for (const auto& layer : layers_) {
        LayerGrads lg;
        lg.d_weights = Tensor2D(layer.out_dim(), layer.in_dim());
        lg.d_bias.assign(layer.out_dim(), 0.0);
        g.layers.push_back(std::move(lg));
    }
    return g;
}

void NetGrads::scale(double s) {
    for (auto& lg : layers) {
        for (double& w : lg.d_weights.data) w *= s;
        for (double& b : lg.d_bias) b *= s;
    }
}

void NetGrads::add_scaled(const NetGrads& other, double s) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& src = other.layers[i];
        auto& dst = layers[i];
        for (std::size_t j = 0; j < dst.d_weights.size(); ++j)
            dst.d_weights.data[j] += s * src.d_weights.data[j];
        for (std::size_t j = 0; j < dst.d_bias.size(); ++j) dst.d_bias[j] += s * src.d_bias[j];
    }
}

bool NetGrads::finite() const {
    for (const auto& lg : layers) {
        if (!all_finite(lg.d_weights)) return false;
        for (double b : lg.d_bias)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

// --- adam ---------------------------------------------------------------------

AdamState AdamState::for_network(const Network& net, AdamConfig cfg) {
    AdamState state;
    state.cfg = cfg;
    NetGrads zeros = net.zero_grads();
    state.m = zeros.layers;
    state.v = std::move(zeros.layers);
    return state;
}

void adam_step_tensor(double* p, double* m, double* v, const double* g, std::size_t n,
                      const AdamConfig& cfg, std::uint64_t step_after) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_after));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_after));
    kernels::active().adam_update(p, m, v, g, n, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, bc1, bc2);
}

bool adam_step(Network& net, const NetGrads& grads, AdamState& state) {
    if (grads.layers.size() != net.layer_count())
        throw DimensionError("adam_step: gradient/network layer count mismatch");
    if (!grads.finite()) return false;  // rejected step, state untouched
    const std::uint64_t t = state.step + 1;
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        DenseLayer& layer = net.layer(i);
        const LayerGrads& g = grads.layers[i];
        if (!g.d_weights.same_shape(layer.weights) || g.d_bias.size() != layer.bias.size())
            throw DimensionError("adam_step: gradient shape mismatch at layer " +
                                 std::to_string(i));
        adam_step_tensor(layer.weights.ptr(), state.m[i].d_weights.ptr(),
                         state.v[i].d_weights.ptr(), g.d_weights.ptr(), g.d_weights.size(),
                         state.cfg, t);
        adam_step_tensor(layer.bias.data(), state.m[i].d_bias.data(), state.v[i].d_bias.data(),
                         g.d_bias.data(), g.d_bias.size(), state.cfg, t);
    }
    state.step = t;
    return true;
}

// --- checkpoint io --------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'G', 'O', 'L', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in, std::size_t& offset) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FormatError("checkpoint truncated while reading u32", offset);
    offset += 4;
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in, std::size_t& offset) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw FormatError("checkpoint truncated while reading f64", offset);
    offset += 8;
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void save_network(std::ostream& out, const Network& net) {
    out.write(kMagic, 8);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(net.layer_count()));
    for (const auto& layer : net.layers()) {
        put_u32(out, static_cast<std::uint32_t>(layer.out_dim()));
        put_u32(out, static_cast<std::uint32_t>(layer.in_dim()));
        const unsigned char act = static_cast<unsigned char>(layer.activation);
        const unsigned char has_sn = layer.spectral ? 1 : 0;
        out.put(static_cast<char>(act));
        out.put(static_cast<char>(has_sn));
        for (double w : layer.weights.data) put_f64(out, w);
        for (double b : layer.bias) put_f64(out, b);
        if (layer.spectral)
            for (double u : layer.sn_u) put_f64(out, u);
    }
}

Network load_network(std::istream& in) {
    std::size_t offset = 0;
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw FormatError("bad checkpoint magic (want GOLDCKPT)", offset);
    offset += 8;
    const std::uint32_t version = get_u32(in, offset);
    if (version != kVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version), offset);
    const std::uint32_t count = get_u32(in, offset);
    Network net;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t out_dim = get_u32(in, offset);
        const std::uint32_t in_dim = get_u32(in, offset);
        const int act = in.get();
        const int has_sn = in.get();
        if (act == EOF || has_sn == EOF)
            throw FormatError("checkpoint truncated in layer header", offset);
        offset += 2;
        if (act > static_cast<int>(Activation::Tanh))
            throw FormatError("bad activation tag " + std::to_string(act), offset);
        DenseLayer layer;
        layer.weights = Tensor2D(out_dim, in_dim);
        layer.bias.assign(out_dim, 0.0);
        layer.activation = static_cast<Activation>(act);
        layer.spectral = has_sn != 0;
        for (double& w : layer.weights.data) w = get_f64(in, offset);
        for (double& b : layer.bias) b = get_f64(in, offset);
        if (layer.spectral) {
            layer.sn_u.assign(out_dim, 0.0);
            for (double& u : layer.sn_u) u = get_f64(in, offset);
        }
        net.append(std::move(layer));
    }
    return net;
}

void save_network_file(const std::string& path, const Network& net) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot open checkpoint for writing: " + path);
    save_network(out, net);
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot open checkpoint: " + path);
    return load_network(in);
}

}  // namespace goldlab::nn
