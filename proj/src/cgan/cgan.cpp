#include "goldlab/cgan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "goldlab/errors.hpp"

namespace goldlab::cgan {

namespace {

nn::Network build_generator(const ModelConfig& cfg, Rng& rng) {
    nn::Network net;
    std::size_t prev = cfg.latent_dim + static_cast<std::size_t>(cfg.class_count);
    for (std::size_t h : cfg.gen_hidden) {
        net.append(nn::make_dense(rng, prev, h, nn::Activation::Relu));
        prev = h;
    }
    net.append(nn::make_dense(rng, prev, cfg.data_dim, nn::Activation::Identity));
    return net;
}

nn::Network build_trunk(const ModelConfig& cfg, Rng& rng) {
    nn::Network net;
    std::size_t prev = cfg.data_dim;
    for (std::size_t h : cfg.disc_hidden) {
        net.append(nn::make_dense(rng, prev, h, nn::Activation::LeakyRelu, /*spectral=*/true));
        prev = h;
    }
    return net;
}

nn::AdamConfig adam_for(const ModelConfig& cfg, double lr) {
    return nn::AdamConfig{lr, cfg.adam_beta1, cfg.adam_beta2, 1e-8};
}

Tensor2D vconcat(const Tensor2D& a, const Tensor2D& b) {
    if (a.rows == 0) return b;
    if (b.rows == 0) return a;
    if (a.cols != b.cols) throw DimensionError("vconcat: column mismatch");
    Tensor2D out(a.rows + b.rows, a.cols);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return out;
}

Tensor2D latent_with_onehot(const Tensor2D& z, const std::vector<int>& classes,
                            int class_count, double class_gain) {
    const std::size_t k = static_cast<std::size_t>(class_count);
    Tensor2D gin(z.rows, z.cols + k);
    for (std::size_t r = 0; r < z.rows; ++r) {
        auto dst = gin.row(r);
        auto src = z.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
        dst[z.cols + static_cast<std::size_t>(classes[r])] = class_gain;
    }
    return gin;
}

void check_classes(const std::vector<int>& classes, int class_count) {
    for (int c : classes)
        if (c < 0 || c >= class_count)
            throw ConfigError("class " + std::to_string(c) + " out of range [0, " +
                              std::to_string(class_count) + ")");
}

}  // namespace

CGanModel make_model(const ModelConfig& cfg, Rng& rng) {
    if (cfg.class_count < 2) throw ConfigError("model needs at least 2 classes");
    if (cfg.gen_hidden.empty() || cfg.disc_hidden.empty())
        throw ConfigError("model needs at least one hidden layer per player");
    CGanModel m;
    m.cfg = cfg;
    m.generator = build_generator(cfg, rng);
    m.trunk = build_trunk(cfg, rng);
    const std::size_t feat = cfg.disc_hidden.back();
    m.head_dg = nn::Network({nn::make_dense_zero(feat, 1, nn::Activation::Sigmoid)});
    m.head_dc = nn::Network({nn::make_dense_zero(feat, static_cast<std::size_t>(cfg.class_count),
                                                 nn::Activation::Softmax)});
    m.gen_state = nn::AdamState::for_network(m.generator, adam_for(cfg, cfg.lr_g));
    m.trunk_state = nn::AdamState::for_network(m.trunk, adam_for(cfg, cfg.lr_d));
    m.dg_state = nn::AdamState::for_network(m.head_dg, adam_for(cfg, cfg.lr_d));
    m.dc_state = nn::AdamState::for_network(m.head_dc, adam_for(cfg, cfg.lr_d));
    return m;
}

void reinit_discriminator(CGanModel& model, Rng& rng) {
    model.trunk = build_trunk(model.cfg, rng);
    const std::size_t feat = model.cfg.disc_hidden.back();
    model.head_dg = nn::Network({nn::make_dense_zero(feat, 1, nn::Activation::Sigmoid)});
    model.head_dc = nn::Network({nn::make_dense_zero(
        feat, static_cast<std::size_t>(model.cfg.class_count), nn::Activation::Softmax)});
    model.trunk_state = nn::AdamState::for_network(model.trunk, adam_for(model.cfg, model.cfg.lr_d));
    model.dg_state = nn::AdamState::for_network(model.head_dg, adam_for(model.cfg, model.cfg.lr_d));
    model.dc_state = nn::AdamState::for_network(model.head_dc, adam_for(model.cfg, model.cfg.lr_d));
}

Tensor2D sample_latent(std::size_t n, std::size_t latent_dim, Rng& rng) {
    Tensor2D z(n, latent_dim);
    for (double& v : z.data) v = rng.normal();
    return z;
}

std::vector<int> sample_classes(std::size_t n, int class_count, Rng& rng) {
    std::vector<int> classes(n);
    for (int& c : classes)
        c = static_cast<int>(rng.below(static_cast<std::uint64_t>(class_count)));
    return classes;
}

Tensor2D generate(const CGanModel& model, const Tensor2D& z, const std::vector<int>& classes) {
    if (z.rows != classes.size())
        throw DimensionError("generate: latent rows != class count");
    if (z.cols != model.cfg.latent_dim)
        throw DimensionError("generate: latent dim " + std::to_string(z.cols) + " != " +
                             std::to_string(model.cfg.latent_dim));
    check_classes(classes, model.cfg.class_count);
    return model.generator.forward(
        latent_with_onehot(z, classes, model.cfg.class_count, model.cfg.class_gain));
}

DiscOut discriminate(const CGanModel& model, const Tensor2D& x) {
    if (x.cols != model.cfg.data_dim)
        throw DimensionError("discriminate: input dim " + std::to_string(x.cols) + " != " +
                             std::to_string(model.cfg.data_dim));
    const Tensor2D features = model.trunk.forward(x);
    const Tensor2D p = model.head_dg.forward(features);
    DiscOut out;
    out.d_g.resize(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out.d_g[r] = nn::clamp_prob(p.at(r, 0));
    out.d_c = model.head_dc.forward(features);
    return out;
}

GanLosses loss_gan(std::span<const double> d_g_real, std::span<const double> d_g_fake) {
    double real_term = 0.0;
    for (double d : d_g_real) real_term -= nn::safe_log(d);
    if (!d_g_real.empty()) real_term /= static_cast<double>(d_g_real.size());
    double fake_term = 0.0;
    double gen_term = 0.0;
    for (double d : d_g_fake) {
        fake_term -= nn::safe_log(1.0 - d);
        gen_term -= nn::safe_log(d);
    }
    if (!d_g_fake.empty()) {
        fake_term /= static_cast<double>(d_g_fake.size());
        gen_term /= static_cast<double>(d_g_fake.size());
    }
    return {real_term + fake_term, gen_term};
}

double loss_ac(const Tensor2D& d_c_real, std::span<const int> c_real, const Tensor2D& d_c_fake,
               std::span<const int> c_fake, double lambda_c) {
    if (lambda_c < 0.0) throw ConfigError("lambda_c must be >= 0");
    double real_term = 0.0;
    for (std::size_t r = 0; r < c_real.size(); ++r)
        real_term -= nn::safe_log(d_c_real.at(r, static_cast<std::size_t>(c_real[r])));
    if (!c_real.empty()) real_term /= static_cast<double>(c_real.size());
    double fake_term = 0.0;
    for (std::size_t r = 0; r < c_fake.size(); ++r)
        fake_term -= nn::safe_log(d_c_fake.at(r, static_cast<std::size_t>(c_fake[r])));
    if (!c_fake.empty()) fake_term /= static_cast<double>(c_fake.size());
    return real_term + lambda_c * fake_term;
}

namespace {

double weighted_fake_gan_loss(std::span<const double> d_fake, std::span<const double> w) {
    double loss = 0.0;
    for (std::size_t i = 0; i < d_fake.size(); ++i)
        loss -= (w.empty() ? 1.0 : w[i]) * nn::safe_log(1.0 - d_fake[i]);
    return d_fake.empty() ? 0.0 : loss / static_cast<double>(d_fake.size());
}

double weighted_fake_ce(const Tensor2D& q, std::span<const int> labels,
                        std::span<const double> w) {
    double loss = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        loss -= (w.empty() ? 1.0 : w[i]) *
                nn::safe_log(q.at(i, static_cast<std::size_t>(labels[i])));
    return labels.empty() ? 0.0 : loss / static_cast<double>(labels.size());
}

}  // namespace

DiscGrads discriminator_grads(const CGanModel& model, const Batch& labeled,
                              const Batch& unlabeled, const Tensor2D& x_fake,
                              const std::vector<int>& c_fake, double lambda_c,
                              std::span<const double> fake_weights) {
    const std::size_t n_f = x_fake.rows;
    const std::size_t n_l = labeled.size();
    const Tensor2D x_real = vconcat(labeled.x, unlabeled.x);
    const std::size_t n_r = x_real.rows;
    if (n_r == 0) throw ConfigError("discriminator_grads: no real samples");

    nn::ForwardCache trunk_real_c, trunk_fake_c, dg_real_c, dg_fake_c, dc_real_c, dc_fake_c;
    const Tensor2D feat_real = model.trunk.forward(x_real, &trunk_real_c);
    const Tensor2D feat_fake = model.trunk.forward(x_fake, &trunk_fake_c);
    const Tensor2D p_real = model.head_dg.forward(feat_real, &dg_real_c);
    const Tensor2D p_fake = model.head_dg.forward(feat_fake, &dg_fake_c);
    const Tensor2D q_real = model.head_dc.forward(feat_real, &dc_real_c);
    const Tensor2D q_fake = model.head_dc.forward(feat_fake, &dc_fake_c);

    DiscGrads out;
    std::vector<double> dgr(n_r), dgf(n_f);
    for (std::size_t i = 0; i < n_r; ++i) dgr[i] = nn::clamp_prob(p_real.at(i, 0));
    for (std::size_t i = 0; i < n_f; ++i) dgf[i] = nn::clamp_prob(p_fake.at(i, 0));
    for (double d : dgr) out.mean_dg_real += d;
    out.mean_dg_real /= static_cast<double>(n_r);
    for (double d : dgf) out.mean_dg_fake += d;
    if (n_f > 0) out.mean_dg_fake /= static_cast<double>(n_f);

    double real_gan = 0.0;
    for (double d : dgr) real_gan -= nn::safe_log(d);
    real_gan /= static_cast<double>(n_r);
    const double fake_gan = weighted_fake_gan_loss(dgf, fake_weights);
    double ac_real = 0.0;
    for (std::size_t i = 0; i < n_l; ++i)
        ac_real -= nn::safe_log(q_real.at(i, static_cast<std::size_t>(labeled.labels[i])));
    if (n_l > 0) ac_real /= static_cast<double>(n_l);
    const double ac_fake = weighted_fake_ce(q_fake, c_fake, fake_weights);
    out.ac_loss = ac_real + lambda_c * ac_fake;
    out.d_loss = real_gan + fake_gan + out.ac_loss;
    if (!std::isfinite(out.d_loss))
        throw NumericError("train_step: non-finite discriminator loss (gan_real=" +
                           std::to_string(real_gan) + " gan_fake=" + std::to_string(fake_gan) +
                           " ac=" + std::to_string(out.ac_loss) + ")");

    // Gradient seeds at the head logits.
    Tensor2D dz_dg_real(n_r, 1), dz_dg_fake(n_f, 1);
    for (std::size_t i = 0; i < n_r; ++i)
        dz_dg_real.at(i, 0) = (p_real.at(i, 0) - 1.0) / static_cast<double>(n_r);
    for (std::size_t i = 0; i < n_f; ++i) {
        const double w = fake_weights.empty() ? 1.0 : fake_weights[i];
        dz_dg_fake.at(i, 0) = w * p_fake.at(i, 0) / static_cast<double>(n_f);
    }
    Tensor2D dz_dc_real(n_r, q_real.cols), dz_dc_fake(n_f, q_fake.cols);
    for (std::size_t i = 0; i < n_l; ++i) {
        for (std::size_t j = 0; j < q_real.cols; ++j)
            dz_dc_real.at(i, j) = q_real.at(i, j) / static_cast<double>(n_l);
        dz_dc_real.at(i, static_cast<std::size_t>(labeled.labels[i])) -=
            1.0 / static_cast<double>(n_l);
    }
    for (std::size_t i = 0; i < n_f; ++i) {
        const double w = fake_weights.empty() ? 1.0 : fake_weights[i];
        const double scale = lambda_c * w / static_cast<double>(n_f);
        for (std::size_t j = 0; j < q_fake.cols; ++j)
            dz_dc_fake.at(i, j) = scale * q_fake.at(i, j);
        dz_dc_fake.at(i, static_cast<std::size_t>(c_fake[i])) -= scale;
    }

    Tensor2D dfeat_real_dg, dfeat_fake_dg, dfeat_real_dc, dfeat_fake_dc;
    out.head_dg = model.head_dg.backward_from_logits(dg_real_c, dz_dg_real, &dfeat_real_dg);
    out.head_dg.add_scaled(
        model.head_dg.backward_from_logits(dg_fake_c, dz_dg_fake, &dfeat_fake_dg), 1.0);
    out.head_dc = model.head_dc.backward_from_logits(dc_real_c, dz_dc_real, &dfeat_real_dc);
    out.head_dc.add_scaled(
        model.head_dc.backward_from_logits(dc_fake_c, dz_dc_fake, &dfeat_fake_dc), 1.0);

    Tensor2D dfeat_real(n_r, feat_real.cols), dfeat_fake(n_f, feat_fake.cols);
    for (std::size_t i = 0; i < dfeat_real.size(); ++i)
        dfeat_real.data[i] = dfeat_real_dg.data[i] + dfeat_real_dc.data[i];
    for (std::size_t i = 0; i < dfeat_fake.size(); ++i)
        dfeat_fake.data[i] = dfeat_fake_dg.data[i] + dfeat_fake_dc.data[i];

    out.trunk = model.trunk.backward(trunk_real_c, dfeat_real);
    out.trunk.add_scaled(model.trunk.backward(trunk_fake_c, dfeat_fake), 1.0);
    return out;
}

GenGrads generator_grads(const CGanModel& model, const Tensor2D& gen_input,
                         const std::vector<int>& c_fake, double lambda_c,
                         std::span<const double> fake_weights, const Tensor2D* input_noise) {
    const std::size_t n_f = gen_input.rows;
    if (n_f == 0) throw ConfigError("generator_grads: empty fake batch");
    nn::ForwardCache gen_c, trunk_c, dg_c, dc_c;
    Tensor2D x_gen = model.generator.forward(gen_input, &gen_c);
    if (input_noise) {
        if (!input_noise->same_shape(x_gen))
            throw DimensionError("generator_grads: noise shape mismatch");
        for (std::size_t i = 0; i < x_gen.size(); ++i) x_gen.data[i] += input_noise->data[i];
    }
    const Tensor2D feat = model.trunk.forward(x_gen, &trunk_c);
    const Tensor2D p = model.head_dg.forward(feat, &dg_c);
    const Tensor2D q = model.head_dc.forward(feat, &dc_c);

    GenGrads out;
    double g_gan = 0.0;
    double g_ac = 0.0;
    for (std::size_t i = 0; i < n_f; ++i) {
        const double w = fake_weights.empty() ? 1.0 : fake_weights[i];
        g_gan -= w * nn::safe_log(nn::clamp_prob(p.at(i, 0)));
        g_ac -= w * nn::safe_log(q.at(i, static_cast<std::size_t>(c_fake[i])));
    }
    g_gan /= static_cast<double>(n_f);
    g_ac = lambda_c * g_ac / static_cast<double>(n_f);
    out.g_loss = g_gan + g_ac;
    if (!std::isfinite(out.g_loss))
        throw NumericError("train_step: non-finite generator loss (gan=" +
                           std::to_string(g_gan) + " ac=" + std::to_string(g_ac) + ")");

    Tensor2D dz_dg(n_f, 1), dz_dc(n_f, q.cols);
    for (std::size_t i = 0; i < n_f; ++i) {
        const double w = fake_weights.empty() ? 1.0 : fake_weights[i];
        dz_dg.at(i, 0) = w * (p.at(i, 0) - 1.0) / static_cast<double>(n_f);
        const double scale = lambda_c * w / static_cast<double>(n_f);
        for (std::size_t j = 0; j < q.cols; ++j) dz_dc.at(i, j) = scale * q.at(i, j);
        dz_dc.at(i, static_cast<std::size_t>(c_fake[i])) -= scale;
    }

    Tensor2D dfeat_dg, dfeat_dc;
    model.head_dg.backward_from_logits(dg_c, dz_dg, &dfeat_dg);
    model.head_dc.backward_from_logits(dc_c, dz_dc, &dfeat_dc);
    Tensor2D dfeat(n_f, feat.cols);
    for (std::size_t i = 0; i < dfeat.size(); ++i)
        dfeat.data[i] = dfeat_dg.data[i] + dfeat_dc.data[i];
    Tensor2D dx;
    model.trunk.backward(trunk_c, dfeat, &dx);
    out.gen = model.generator.backward(gen_c, dx);
    return out;
}

StepMetrics train_step_hooked(CGanModel& model, const Batch& labeled, const Batch& unlabeled,
                              const TrainConfig& cfg, Rng& rng, const WeightHook* hook) {
    const std::size_t n_f = cfg.batch_size;
    const std::size_t n_l = labeled.size();
    if (n_l > 0 && labeled.labels.size() != n_l)
        throw DimensionError("train_step: labeled batch missing labels");
    if (n_l > 0) check_classes(labeled.labels, model.cfg.class_count);
    if (n_l + unlabeled.size() == 0) throw ConfigError("train_step: no real samples");

    // One fake batch per step, shared by the discriminator and generator
    // updates so both players see the same samples and the same weights.
    const Tensor2D z = sample_latent(n_f, model.cfg.latent_dim, rng);
    const std::vector<int> c_fake = sample_classes(n_f, model.cfg.class_count, rng);
    const Tensor2D gen_in =
        latent_with_onehot(z, c_fake, model.cfg.class_count, model.cfg.class_gain);
    const Tensor2D x_fake = model.generator.forward(gen_in);

    model.trunk.power_iterate_spectral(1);

    StepWeights weights;
    if (hook) {
        weights = (*hook)(model, x_fake, c_fake);
        if ((!weights.d.empty() && weights.d.size() != n_f) ||
            (!weights.g.empty() && weights.g.size() != n_f))
            throw DimensionError("train_step: weight hook returned wrong batch size");
    }

    StepMetrics metrics;

    Batch labeled_in = labeled;
    Batch unlabeled_in = unlabeled;
    Tensor2D x_fake_in = x_fake;
    if (cfg.instance_noise > 0.0) {
        for (double& v : labeled_in.x.data) v += cfg.instance_noise * rng.normal();
        for (double& v : unlabeled_in.x.data) v += cfg.instance_noise * rng.normal();
        for (double& v : x_fake_in.data) v += cfg.instance_noise * rng.normal();
    }

    DiscGrads d = discriminator_grads(model, labeled_in, unlabeled_in, x_fake_in, c_fake,
                                      cfg.lambda_c, weights.d);
    metrics.d_loss = d.d_loss;
    metrics.ac_loss = d.ac_loss;
    metrics.mean_dg_real = d.mean_dg_real;
    metrics.mean_dg_fake = d.mean_dg_fake;
    if (d.trunk.finite() && d.head_dg.finite() && d.head_dc.finite()) {
        nn::adam_step(model.trunk, d.trunk, model.trunk_state);
        nn::adam_step(model.head_dg, d.head_dg, model.dg_state);
        nn::adam_step(model.head_dc, d.head_dc, model.dc_state);
    } else {
        metrics.d_updated = false;
    }

    Tensor2D g_noise;
    const Tensor2D* g_noise_ptr = nullptr;
    if (cfg.instance_noise > 0.0) {
        g_noise = Tensor2D(n_f, model.cfg.data_dim);
        for (double& v : g_noise.data) v = cfg.instance_noise * rng.normal();
        g_noise_ptr = &g_noise;
    }
    GenGrads g = generator_grads(model, gen_in, c_fake, cfg.lambda_c, weights.g, g_noise_ptr);
    metrics.g_loss = g.g_loss;
    if (g.gen.finite()) {
        nn::adam_step(model.generator, g.gen, model.gen_state);
    } else {
        metrics.g_updated = false;
    }

    return metrics;
}

// --- checkpoint io --------------------------------------------------------------

namespace {
constexpr char kModelMagic[8] = {'G', 'O', 'L', 'D', 'C', 'G', 'A', 'N'};
constexpr std::uint32_t kModelVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FormatError("model checkpoint truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw FormatError("model checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
}  // namespace

void save_model_file(const std::string& path, const CGanModel& model,
                     std::uint64_t config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot open model checkpoint for writing: " + path);
    out.write(kModelMagic, 8);
    put_u32(out, kModelVersion);
    put_u32(out, static_cast<std::uint32_t>(model.cfg.latent_dim));
    put_u32(out, static_cast<std::uint32_t>(model.cfg.class_count));
    put_u32(out, static_cast<std::uint32_t>(model.cfg.data_dim));
    put_u64(out, config_hash);
    nn::save_network(out, model.generator);
    nn::save_network(out, model.trunk);
    nn::save_network(out, model.head_dg);
    nn::save_network(out, model.head_dc);
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot open model checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kModelMagic, 8) != 0)
        throw FormatError("bad model checkpoint magic (want GOLDCGAN)");
    const std::uint32_t version = get_u32(in);
    if (version != kModelVersion)
        throw FormatError("unsupported model checkpoint version " + std::to_string(version));
    LoadedModel loaded;
    ModelConfig cfg;
    cfg.latent_dim = get_u32(in);
    cfg.class_count = static_cast<int>(get_u32(in));
    cfg.data_dim = get_u32(in);
    loaded.config_hash = get_u64(in);
    CGanModel& m = loaded.model;
    m.generator = nn::load_network(in);
    m.trunk = nn::load_network(in);
    m.head_dg = nn::load_network(in);
    m.head_dc = nn::load_network(in);
    cfg.gen_hidden.clear();
    for (std::size_t i = 0; i + 1 < m.generator.layer_count(); ++i)
        cfg.gen_hidden.push_back(m.generator.layer(i).out_dim());
    cfg.disc_hidden.clear();
    for (std::size_t i = 0; i < m.trunk.layer_count(); ++i)
        cfg.disc_hidden.push_back(m.trunk.layer(i).out_dim());
    m.cfg = cfg;
    m.gen_state = nn::AdamState::for_network(m.generator, adam_for(cfg, cfg.lr_g));
    m.trunk_state = nn::AdamState::for_network(m.trunk, adam_for(cfg, cfg.lr_d));
    m.dg_state = nn::AdamState::for_network(m.head_dg, adam_for(cfg, cfg.lr_d));
    m.dc_state = nn::AdamState::for_network(m.head_dc, adam_for(cfg, cfg.lr_d));
    return loaded;
}

}  // namespace goldlab::cgan
