#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "goldlab/cgan.hpp"
#include "goldlab/errors.hpp"
#include "goldlab/mixture.hpp"
#include "test_util.hpp"

using namespace goldlab;
using testutil::random_tensor;

namespace {

cgan::ModelConfig micro_config() {
    cgan::ModelConfig cfg;
    cfg.data_dim = 2;
    cfg.latent_dim = 3;
    cfg.class_count = 2;
    cfg.gen_hidden = {4};
    cfg.disc_hidden = {4};
    return cfg;
}

cgan::Batch mixture_batch(const data::SyntheticMixture& mix, std::size_t n, Rng& rng,
                          bool with_labels) {
    cgan::Batch batch;
    const auto points = mix.sample(n, rng);
    batch.x = Tensor2D(n, 2);
    if (with_labels) batch.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        batch.x.at(i, 0) = points[i].x[0];
        batch.x.at(i, 1) = points[i].x[1];
        if (with_labels) batch.labels[i] = points[i].label;
    }
    return batch;
}

}  // namespace

TEST_CASE("generate is deterministic and shape-correct") {
    Rng rng(0);
    const cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    Rng zrng(1);
    const Tensor2D z = cgan::sample_latent(5, 3, zrng);
    const std::vector<int> classes = {0, 1, 0, 1, 1};
    const Tensor2D a = cgan::generate(model, z, classes);
    const Tensor2D b = cgan::generate(model, z, classes);
    CHECK(a.rows == 5);
    CHECK(a.cols == 2);
    CHECK(a.data == b.data);
}

TEST_CASE("generate rejects out-of-range classes") {
    Rng rng(0);
    const cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    Rng zrng(1);
    const Tensor2D z = cgan::sample_latent(2, 3, zrng);
    CHECK_THROWS_AS(cgan::generate(model, z, {0, 2}), ConfigError);
    CHECK_THROWS_AS(cgan::generate(model, z, {0, -1}), ConfigError);
}

TEST_CASE("untrained discriminator is perfectly calibrated (zero heads)") {
    Rng rng(0);
    const cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    Rng xrng(2);
    const Tensor2D x = random_tensor(8, 2, xrng, 3.0);
    const cgan::DiscOut out = cgan::discriminate(model, x);
    for (double d : out.d_g) CHECK(d == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t r = 0; r < out.d_c.rows; ++r) {
        double sum = 0.0;
        for (double p : out.d_c.row(r)) {
            CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("discriminate keeps logs finite even for extreme inputs") {
    Rng rng(0);
    cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    // push the dg head hard toward saturation
    model.head_dg.layer(0).bias[0] = 1000.0;
    Rng xrng(2);
    const cgan::DiscOut out = cgan::discriminate(model, random_tensor(4, 2, xrng));
    for (double d : out.d_g) {
        CHECK(std::isfinite(std::log(d)));
        CHECK(std::isfinite(std::log(1.0 - d)));
    }
}

TEST_CASE("loss_gan closed forms") {
    const std::vector<double> half = {0.5, 0.5};
    const auto losses = cgan::loss_gan(half, half);
    CHECK(losses.discriminator == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
    CHECK(losses.generator == doctest::Approx(std::log(2.0)).epsilon(1e-9));

    const std::vector<double> sure_real = {1.0 - 1e-7};
    const std::vector<double> sure_fake = {1e-7};
    CHECK(cgan::loss_gan(sure_real, sure_fake).discriminator ==
          doctest::Approx(0.0).epsilon(1e-5));

    double prev = 1e300;
    for (double d = 0.05; d < 1.0; d += 0.05) {
        const std::vector<double> fake = {d};
        const double g = cgan::loss_gan(sure_real, fake).generator;
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("loss_ac closed forms") {
    Tensor2D uniform(1, 2);
    uniform.fill(0.5);
    const std::vector<int> label = {0};
    CHECK(cgan::loss_ac(uniform, label, uniform, label, 0.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(cgan::loss_ac(uniform, label, uniform, label, 0.1) ==
          doctest::Approx(1.1 * std::log(2.0)).epsilon(1e-9));
    CHECK(cgan::loss_ac(uniform, label, uniform, label, 0.1) ==
          doctest::Approx(0.7625).epsilon(1e-4));
    CHECK_THROWS_AS(cgan::loss_ac(uniform, label, uniform, label, -0.5), ConfigError);
}

namespace {

// Move the frozen micro-model into generic position: non-zero heads so every
// gradient path is live, non-zero biases so no pre-activation sits exactly on
// a relu/leaky kink (where finite differences are ill-posed).
void randomize_for_gradcheck(cgan::CGanModel& model, Rng& rng) {
    for (auto& w : model.head_dg.layer(0).weights.data) w = 0.3 * rng.normal();
    for (auto& w : model.head_dc.layer(0).weights.data) w = 0.3 * rng.normal();
    for (auto* net : {&model.generator, &model.trunk, &model.head_dg, &model.head_dc})
        for (std::size_t l = 0; l < net->layer_count(); ++l)
            for (double& b : net->layer(l).bias) b = 0.1 * rng.normal();
}

}  // namespace

TEST_CASE("discriminator loss gradients match finite differences on a micro model") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        cgan::CGanModel model = cgan::make_model(micro_config(), rng);
        randomize_for_gradcheck(model, rng);
        model.trunk.power_iterate_spectral(2);

        const auto mix = data::default_mixture();
        cgan::Batch labeled = mixture_batch(mix, 3, rng, true);
        cgan::Batch unlabeled = mixture_batch(mix, 2, rng, false);
        const Tensor2D x_fake = random_tensor(3, 2, rng);
        const std::vector<int> c_fake = {0, 1, 1};
        const double lambda_c = 0.1;

        const cgan::DiscGrads analytic =
            discriminator_grads(model, labeled, unlabeled, x_fake, c_fake, lambda_c, {});

        const double h = 1e-6;
        double worst = 0.0;
        const auto fd_check = [&](double& param, double grad) {
            const double saved = param;
            param = saved + h;
            const double up = discriminator_grads(model, labeled, unlabeled, x_fake, c_fake,
                                                  lambda_c, {})
                                  .d_loss;
            param = saved - h;
            const double down = discriminator_grads(model, labeled, unlabeled, x_fake, c_fake,
                                                    lambda_c, {})
                                    .d_loss;
            param = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({std::abs(numeric), std::abs(grad), 1e-5});
            worst = std::max(worst, std::abs(numeric - grad) / denom);
        };
        for (std::size_t i = 0; i < model.trunk.layer(0).weights.size(); ++i)
            fd_check(model.trunk.layer(0).weights.data[i],
                     analytic.trunk.layers[0].d_weights.data[i]);
        for (std::size_t i = 0; i < model.head_dg.layer(0).weights.size(); ++i)
            fd_check(model.head_dg.layer(0).weights.data[i],
                     analytic.head_dg.layers[0].d_weights.data[i]);
        for (std::size_t i = 0; i < model.head_dc.layer(0).weights.size(); ++i)
            fd_check(model.head_dc.layer(0).weights.data[i],
                     analytic.head_dc.layers[0].d_weights.data[i]);
        CAPTURE(seed);
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("generator loss gradients match finite differences on a micro model") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        cgan::CGanModel model = cgan::make_model(micro_config(), rng);
        randomize_for_gradcheck(model, rng);
        model.trunk.power_iterate_spectral(2);

        const Tensor2D gen_in = random_tensor(4, 3 + 2, rng);
        const std::vector<int> c_fake = {0, 1, 0, 1};
        const double lambda_c = 0.1;
        const cgan::GenGrads analytic = generator_grads(model, gen_in, c_fake, lambda_c, {});

        const double h = 1e-6;
        double worst = 0.0;
        const auto fd_check = [&](double& param, double grad) {
            const double saved = param;
            param = saved + h;
            const double up = generator_grads(model, gen_in, c_fake, lambda_c, {}).g_loss;
            param = saved - h;
            const double down = generator_grads(model, gen_in, c_fake, lambda_c, {}).g_loss;
            param = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({std::abs(numeric), std::abs(grad), 1e-5});
            worst = std::max(worst, std::abs(numeric - grad) / denom);
        };
        for (std::size_t l = 0; l < model.generator.layer_count(); ++l) {
            for (std::size_t i = 0; i < model.generator.layer(l).weights.size(); ++i)
                fd_check(model.generator.layer(l).weights.data[i],
                         analytic.gen.layers[l].d_weights.data[i]);
            for (std::size_t i = 0; i < model.generator.layer(l).bias.size(); ++i)
                fd_check(model.generator.layer(l).bias[i], analytic.gen.layers[l].d_bias[i]);
        }
        CAPTURE(seed);
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("discriminator step decreases its loss on a fixed batch at small lr") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        cgan::ModelConfig cfg = micro_config();
        cfg.lr_d = 1e-4;
        cgan::CGanModel model = cgan::make_model(cfg, rng);
        const auto mix = data::default_mixture();
        cgan::Batch labeled = mixture_batch(mix, 6, rng, true);
        cgan::Batch unlabeled;
        const Tensor2D x_fake = random_tensor(6, 2, rng);
        std::vector<int> c_fake = {0, 1, 0, 1, 0, 1};

        model.trunk.power_iterate_spectral(1);
        const cgan::DiscGrads before =
            discriminator_grads(model, labeled, unlabeled, x_fake, c_fake, 0.1, {});
        nn::adam_step(model.trunk, before.trunk, model.trunk_state);
        nn::adam_step(model.head_dg, before.head_dg, model.dg_state);
        nn::adam_step(model.head_dc, before.head_dc, model.dc_state);
        const cgan::DiscGrads after =
            discriminator_grads(model, labeled, unlabeled, x_fake, c_fake, 0.1, {});
        CAPTURE(seed);
        CHECK(after.d_loss < before.d_loss);
    }
}

TEST_CASE("unlabeled batch contents never reach the classifier head") {
    Rng rng(3);
    cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    randomize_for_gradcheck(model, rng);  // zero heads would block the GAN gradient path
    model.trunk.power_iterate_spectral(1);
    const auto mix = data::default_mixture();
    cgan::Batch labeled = mixture_batch(mix, 4, rng, true);
    const Tensor2D x_fake = random_tensor(4, 2, rng);
    const std::vector<int> c_fake = {0, 1, 0, 1};

    cgan::Batch unlabeled_a = mixture_batch(mix, 5, rng, false);
    cgan::Batch unlabeled_b = mixture_batch(mix, 5, rng, false);
    REQUIRE(unlabeled_a.x.data != unlabeled_b.x.data);

    const cgan::DiscGrads ga =
        discriminator_grads(model, labeled, unlabeled_a, x_fake, c_fake, 0.1, {});
    const cgan::DiscGrads gb =
        discriminator_grads(model, labeled, unlabeled_b, x_fake, c_fake, 0.1, {});
    CHECK(ga.head_dc.layers[0].d_weights.data == gb.head_dc.layers[0].d_weights.data);
    CHECK(ga.head_dc.layers[0].d_bias == gb.head_dc.layers[0].d_bias);
    // while the GAN-side gradients do see the unlabeled samples
    CHECK(ga.trunk.layers[0].d_weights.data != gb.trunk.layers[0].d_weights.data);
}

TEST_CASE("train_step accepts an empty unlabeled batch (fully supervised)") {
    Rng rng(1);
    cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    const auto mix = data::default_mixture();
    cgan::Batch labeled = mixture_batch(mix, 8, rng, true);
    cgan::TrainConfig cfg;
    cfg.batch_size = 8;
    const auto metrics = cgan::train_step(model, labeled, {}, cfg, rng);
    CHECK(std::isfinite(metrics.d_loss));
    CHECK(std::isfinite(metrics.g_loss));
    CHECK(metrics.d_updated);
    CHECK(metrics.g_updated);
}

TEST_CASE("train_step with no real data at all is a config error") {
    Rng rng(1);
    cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    cgan::TrainConfig cfg;
    cfg.batch_size = 4;
    CHECK_THROWS_AS(cgan::train_step(model, {}, {}, cfg, rng), ConfigError);
}

TEST_CASE("reinit_discriminator keeps the generator bit-identical") {
    Rng rng(5);
    cgan::ModelConfig mc = micro_config();
    cgan::CGanModel model = cgan::make_model(mc, rng);
    const auto mix = data::default_mixture();
    cgan::TrainConfig cfg;
    cfg.batch_size = 8;
    for (int step = 0; step < 20; ++step) {
        cgan::Batch labeled = mixture_batch(mix, 8, rng, true);
        cgan::train_step(model, labeled, {}, cfg, rng);
    }
    Rng zrng(7);
    const Tensor2D z = cgan::sample_latent(6, mc.latent_dim, zrng);
    const std::vector<int> classes = {0, 1, 0, 1, 0, 1};
    const Tensor2D before = cgan::generate(model, z, classes);
    const std::uint64_t gen_step_before = model.gen_state.step;

    Rng reinit_rng(99);
    cgan::reinit_discriminator(model, reinit_rng);
    const Tensor2D after = cgan::generate(model, z, classes);
    CHECK(before.data == after.data);
    CHECK(model.gen_state.step == gen_step_before);

    // fresh zero heads are symmetric again
    Rng xrng(8);
    const cgan::DiscOut disc = cgan::discriminate(model, random_tensor(4, 2, xrng));
    for (double d : disc.d_g) CHECK(d == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(model.trunk_state.step == 0);

    // same reinit seed produces an identical discriminator
    cgan::CGanModel model2 = model;
    Rng reinit_rng2(99);
    cgan::reinit_discriminator(model2, reinit_rng2);
    Rng reinit_rng3(99);
    cgan::reinit_discriminator(model, reinit_rng3);
    CHECK(model.trunk.layer(0).weights.data == model2.trunk.layer(0).weights.data);
}

TEST_CASE("model checkpoint round trip preserves generation and the config hash") {
    namespace fs = std::filesystem;
    Rng rng(17);
    cgan::CGanModel model = cgan::make_model(micro_config(), rng);
    const auto mix = data::default_mixture();
    cgan::TrainConfig cfg;
    cfg.batch_size = 8;
    for (int step = 0; step < 10; ++step) {
        cgan::Batch labeled = mixture_batch(mix, 8, rng, true);
        cgan::train_step(model, labeled, {}, cfg, rng);
    }
    const std::string path =
        (fs::temp_directory_path() / "goldlab_cgan_test.ckpt").string();
    cgan::save_model_file(path, model, 0xdeadbeefULL);
    const cgan::LoadedModel loaded = cgan::load_model_file(path);
    CHECK(loaded.config_hash == 0xdeadbeefULL);
    Rng zrng(3);
    const Tensor2D z = cgan::sample_latent(5, model.cfg.latent_dim, zrng);
    const std::vector<int> classes = {0, 1, 1, 0, 1};
    CHECK(cgan::generate(model, z, classes).data ==
          cgan::generate(loaded.model, z, classes).data);
    const cgan::DiscOut a = cgan::discriminate(model, cgan::generate(model, z, classes));
    const cgan::DiscOut b =
        cgan::discriminate(loaded.model, cgan::generate(loaded.model, z, classes));
    CHECK(a.d_g == b.d_g);
    CHECK(a.d_c.data == b.d_c.data);
}

TEST_CASE("2000 training steps reach the equilibrium band on the synthetic mixture") {
    Rng rng(0);
    cgan::ModelConfig mc;  // default synthetic architecture
    cgan::CGanModel model = cgan::make_model(mc, rng);
    const auto mix = data::default_mixture();
    Rng data_rng(0);
    auto points = mix.sample(2000, data_rng);
    const data::Standardizer st = data::Standardizer::fit(points);
    st.apply_in_place(points);

    cgan::TrainConfig cfg;
    cfg.batch_size = 64;
    cfg.lambda_c = 0.1;

    double tail_real = 0.0, tail_fake = 0.0;
    std::size_t tail_n = 0;
    for (std::size_t step = 1; step <= 2000; ++step) {
        cgan::Batch labeled;
        labeled.x = Tensor2D(cfg.batch_size, 2);
        labeled.labels.resize(cfg.batch_size);
        for (std::size_t i = 0; i < cfg.batch_size; ++i) {
            const auto idx = static_cast<std::size_t>(rng.below(points.size()));
            labeled.x.at(i, 0) = points[idx].x[0];
            labeled.x.at(i, 1) = points[idx].x[1];
            labeled.labels[i] = points[idx].label;
        }
        const auto metrics = cgan::train_step(model, labeled, {}, cfg, rng);
        if (step > 1800) {
            tail_real += metrics.mean_dg_real;
            tail_fake += metrics.mean_dg_fake;
            ++tail_n;
        }
    }
    tail_real /= static_cast<double>(tail_n);
    tail_fake /= static_cast<double>(tail_n);
    CHECK(tail_real > 0.3);
    CHECK(tail_real < 0.7);
    CHECK(tail_fake > 0.3);
    CHECK(tail_fake < 0.7);

    // conditioning must be wired: same z, different class, different output
    Rng zrng(5);
    const Tensor2D z = cgan::sample_latent(8, mc.latent_dim, zrng);
    const Tensor2D x0 = cgan::generate(model, z, std::vector<int>(8, 0));
    const Tensor2D x1 = cgan::generate(model, z, std::vector<int>(8, 1));
    double max_dev = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i)
        max_dev = std::max(max_dev, std::abs(x0.data[i] - x1.data[i]));
    CHECK(max_dev > 1e-3);
}
