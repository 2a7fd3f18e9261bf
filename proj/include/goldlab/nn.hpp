#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "goldlab/rng.hpp"
#include "goldlab/tensor.hpp"

namespace goldlab::nn {

enum class Activation : std::uint8_t {
    Identity = 0,
    Relu = 1,
    LeakyRelu = 2,  // slope 0.2
    Sigmoid = 3,
    Softmax = 4,
    Tanh = 5,
};

const char* activation_name(Activation a);

constexpr double kLeakySlope = 0.2;

// Sigmoid/softmax outputs are clamped into [kProbFloor, 1 - kProbFloor]
// before any log so every downstream score stays finite.
constexpr double kProbFloor = 1e-7;

double clamp_prob(double p);
double safe_log(double p);  // log(clamp_prob(p))
double sigmoid(double z);

// In-place stabilized softmax over each row (row max subtracted pre-exp).
void softmax_rows(Tensor2D& logits);

// Fully-connected layer, weights stored [out x in].
struct DenseLayer {
    Tensor2D weights;
    std::vector<double> bias;
    Activation activation = Activation::Identity;
    bool spectral = false;
    std::vector<double> sn_u;  // persistent power-iteration direction, size out

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
};

// Random init: He scaling for relu-family activations, Xavier otherwise.
DenseLayer make_dense(Rng& rng, std::size_t in, std::size_t out, Activation act,
                      bool spectral = false);
// Zero weights and bias (used for discriminator heads: zero logits mean
// d_g = 0.5 and a uniform class posterior on an untrained model).
DenseLayer make_dense_zero(std::size_t in, std::size_t out, Activation act);

// sigma_hat = ||W^T u|| with v = W^T u / ||W^T u||; this is what one
// power-iteration half-step reports and what the forward pass divides by,
// so a reloaded (W, u) pair reproduces the exact same effective weights.
double spectral_sigma(const DenseLayer& layer, std::vector<double>* v_out = nullptr);

// u <- normalize(W normalize(W^T u)), `iterations` times.
void power_iterate(DenseLayer& layer, int iterations);

// Power-iterate and return the layer's effective (normalized) weights.
// A zero weight matrix comes back unchanged (sigma clamped at 1e-12).
Tensor2D spectral_normalize(DenseLayer& layer, int iterations);

Tensor2D effective_weights(const DenseLayer& layer);

struct LayerCache {
    Tensor2D input;  // batch x in
    Tensor2D pre;    // batch x out
    Tensor2D out;    // batch x out
    double sigma = 1.0;
    std::vector<double> sn_v;  // size in, captured when spectral
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    bool valid = false;
};

struct LayerGrads {
    Tensor2D d_weights;
    std::vector<double> d_bias;
};

struct NetGrads {
    std::vector<LayerGrads> layers;

    void scale(double s);
    void add_scaled(const NetGrads& other, double s);
    bool finite() const;
};

class Network {
public:
    Network() = default;
    explicit Network(std::vector<DenseLayer> layers);

    void append(DenseLayer layer);

    std::size_t in_dim() const;
    std::size_t out_dim() const;
    std::size_t layer_count() const { return layers_.size(); }
    DenseLayer& layer(std::size_t i) { return layers_[i]; }
    const DenseLayer& layer(std::size_t i) const { return layers_[i]; }

    // Runs the net on a batch; fills `cache` when given so backward can run.
    Tensor2D forward(const Tensor2D& input, ForwardCache* cache = nullptr) const;

    // Gradient seeded at the final activation output.
    NetGrads backward(const ForwardCache& cache, const Tensor2D& d_out,
                      Tensor2D* d_input = nullptr) const;

    // Gradient seeded at the final pre-activation (for fused
    // cross-entropy/BCE seeds like softmax - onehot).
    NetGrads backward_from_logits(const ForwardCache& cache, const Tensor2D& d_logits,
                                  Tensor2D* d_input = nullptr) const;

    // One power-iteration step on every spectral layer (call per train step).
    void power_iterate_spectral(int iterations = 1);

    NetGrads zero_grads() const;

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

private:
    NetGrads backward_impl(const ForwardCache& cache, const Tensor2D& seed,
                           bool seed_is_logits, Tensor2D* d_input) const;

    std::vector<DenseLayer> layers_;
};

struct AdamConfig {
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Moment accumulators shape-match the network parameters.
struct AdamState {
    AdamConfig cfg;
    std::uint64_t step = 0;
    std::vector<LayerGrads> m;
    std::vector<LayerGrads> v;

    static AdamState for_network(const Network& net, AdamConfig cfg);
};

// Standard Adam with bias correction. Returns false and leaves everything
// untouched when the gradients contain NaN/Inf (rejected step).
bool adam_step(Network& net, const NetGrads& grads, AdamState& state);

// Single-tensor Adam used by tests and the network-level wrapper.
void adam_step_tensor(double* p, double* m, double* v, const double* g, std::size_t n,
                      const AdamConfig& cfg, std::uint64_t step_after);

// --- checkpoint io -------------------------------------------------------
// Binary format: magic "GOLDCKPT", u32 version, u32 layer count, then per
// layer: u32 out, u32 in, u8 activation, u8 has_spectral, weights and bias
// as little-endian f64, sn_u if present.

void save_network(std::ostream& out, const Network& net);
Network load_network(std::istream& in);
void save_network_file(const std::string& path, const Network& net);
Network load_network_file(const std::string& path);

}  // namespace goldlab::nn
