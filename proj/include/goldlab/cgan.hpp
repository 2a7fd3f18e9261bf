#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "goldlab/nn.hpp"
#include "goldlab/rng.hpp"
#include "goldlab/tensor.hpp"

namespace goldlab::cgan {

// Minibatch of samples; labels empty means the batch is unlabeled.
struct Batch {
    Tensor2D x;
    std::vector<int> labels;

    std::size_t size() const { return x.rows; }
    bool labeled() const { return !labels.empty(); }
};

struct ModelConfig {
    std::size_t data_dim = 2;
    std::size_t latent_dim = 8;
    int class_count = 2;
    std::vector<std::size_t> gen_hidden = {64, 64};
    std::vector<std::size_t> disc_hidden = {64, 64};
    double lr_g = 2e-4;
    double lr_d = 2e-4;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;
    // Scale on the one-hot class block at the generator input. Values above 1
    // make the class signal dominate the generator's early routing.
    double class_gain = 1.0;
};

// Generator G(z, c) plus a two-headed discriminator: a shared trunk
// (spectral-normalized leaky-relu layers), a scalar sigmoid real/generated
// head and a K-way softmax class head. Heads start at zero so an untrained
// model reports d_g = 0.5 and a uniform class posterior.
struct CGanModel {
    ModelConfig cfg;
    nn::Network generator;
    nn::Network trunk;
    nn::Network head_dg;
    nn::Network head_dc;
    nn::AdamState gen_state;
    nn::AdamState trunk_state;
    nn::AdamState dg_state;
    nn::AdamState dc_state;
};

CGanModel make_model(const ModelConfig& cfg, Rng& rng);

// Fresh discriminator (trunk, heads, optimizer states); the generator and its
// optimizer state are left bit-identical.
void reinit_discriminator(CGanModel& model, Rng& rng);

Tensor2D sample_latent(std::size_t n, std::size_t latent_dim, Rng& rng);
std::vector<int> sample_classes(std::size_t n, int class_count, Rng& rng);

// x = G(z ++ onehot(c)). Deterministic given (parameters, z, c).
Tensor2D generate(const CGanModel& model, const Tensor2D& z, const std::vector<int>& classes);

struct DiscOut {
    std::vector<double> d_g;  // clamped into [1e-7, 1 - 1e-7]
    Tensor2D d_c;             // rows are softmax distributions over classes
};

DiscOut discriminate(const CGanModel& model, const Tensor2D& x);

// Closed-form loss values from head probabilities (clamped logs):
// discriminator = mean(-log d_real) + mean(-log(1 - d_fake)),
// generator = mean(-log d_fake) (non-saturating).
struct GanLosses {
    double discriminator;
    double generator;
};
GanLosses loss_gan(std::span<const double> d_g_real, std::span<const double> d_g_fake);

// Cross-entropy on real labeled samples plus lambda_c-weighted cross-entropy
// on generated samples.
double loss_ac(const Tensor2D& d_c_real, std::span<const int> c_real, const Tensor2D& d_c_fake,
               std::span<const int> c_fake, double lambda_c);

struct TrainConfig {
    double lambda_c = 0.1;
    std::size_t batch_size = 64;
    std::size_t baseline_steps = 2000;
    std::size_t reweight_steps = 0;
    double beta_d = 1.0;  // re-weighting exponent, discriminator loss
    double beta_g = 0.0;  // re-weighting exponent, generator loss
    bool literal_beta0 = false;  // beta = 0 reads as sign(d) instead of 1
    // Instance noise applied to the discriminator's real and fake inputs for
    // the current step (training-time only; scoring sees clean inputs). The
    // schedule driver anneals this from instance_noise to 0 over the first
    // half of the run.
    double instance_noise = 0.0;
    std::uint64_t seed = 0;

    std::size_t total_steps() const { return baseline_steps + reweight_steps; }
};

struct StepMetrics {
    double d_loss = 0.0;
    double g_loss = 0.0;
    double ac_loss = 0.0;
    double mean_dg_real = 0.0;
    double mean_dg_fake = 0.0;
    bool d_updated = true;
    bool g_updated = true;
};

// Per-sample stop-gradient weights for the generated terms of one step; both
// vectors sized to the fake batch (or empty for weight 1).
struct StepWeights {
    std::vector<double> d;
    std::vector<double> g;
};

using WeightHook =
    std::function<StepWeights(const CGanModel&, const Tensor2D& x_fake,
                              const std::vector<int>& c_fake)>;

// Pure gradient computations behind train_step_hooked; separated out so the
// loss gradients can be validated against finite differences and compared
// across step variants without optimizer noise. `fake_weights` empty means
// weight 1 on every generated sample.

struct DiscGrads {
    double d_loss = 0.0;
    double ac_loss = 0.0;
    double mean_dg_real = 0.0;
    double mean_dg_fake = 0.0;
    nn::NetGrads trunk;
    nn::NetGrads head_dg;
    nn::NetGrads head_dc;
};

DiscGrads discriminator_grads(const CGanModel& model, const Batch& labeled,
                              const Batch& unlabeled, const Tensor2D& x_fake,
                              const std::vector<int>& c_fake, double lambda_c,
                              std::span<const double> fake_weights);

struct GenGrads {
    double g_loss = 0.0;
    nn::NetGrads gen;
};

// `input_noise`, when given, is added to the generated batch before it enters
// the discriminator (instance noise; gradients pass through unchanged).
GenGrads generator_grads(const CGanModel& model, const Tensor2D& gen_input,
                         const std::vector<int>& c_fake, double lambda_c,
                         std::span<const double> fake_weights,
                         const Tensor2D* input_noise = nullptr);

// One discriminator update then one generator update. The fake batch is drawn
// once and shared by both updates; unlabeled samples enter only the GAN
// terms. `hook`, when given, supplies the generated-term weights (computed
// from the pre-update discriminator, constants w.r.t. the optimization).
StepMetrics train_step_hooked(CGanModel& model, const Batch& labeled, const Batch& unlabeled,
                              const TrainConfig& cfg, Rng& rng, const WeightHook* hook);

inline StepMetrics train_step(CGanModel& model, const Batch& labeled, const Batch& unlabeled,
                              const TrainConfig& cfg, Rng& rng) {
    return train_step_hooked(model, labeled, unlabeled, cfg, rng, nullptr);
}

// --- checkpoint io -----------------------------------------------------------
// "GOLDCGAN" header (version, latent_dim, class count, data dim, config hash)
// followed by the four networks in the nncore checkpoint format.

void save_model_file(const std::string& path, const CGanModel& model,
                     std::uint64_t config_hash);

struct LoadedModel {
    CGanModel model;
    std::uint64_t config_hash = 0;
};
LoadedModel load_model_file(const std::string& path);

}  // namespace goldlab::cgan
