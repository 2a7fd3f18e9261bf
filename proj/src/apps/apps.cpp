#include "goldlab/apps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goldlab/errors.hpp"

namespace goldlab::apps {

double weight(double d, double beta, bool literal_beta0) {
    if (beta < 0.0) throw ConfigError("re-weighting beta must be >= 0");
    if (beta == 0.0) {
        if (!literal_beta0) return 1.0;
        return d < 0.0 ? -1.0 : 1.0;
    }
    const double mag = std::pow(std::abs(d), beta);
    return d < 0.0 ? -mag : mag;
}

cgan::StepMetrics reweighted_train_step(cgan::CGanModel& model, const cgan::Batch& labeled,
                                        const cgan::Batch& unlabeled,
                                        const cgan::TrainConfig& cfg, Rng& rng) {
    cgan::WeightHook hook = [&cfg](const cgan::CGanModel& m, const Tensor2D& x_fake,
                                   const std::vector<int>& c_fake) {
        const cgan::DiscOut disc = cgan::discriminate(m, x_fake);
        cgan::StepWeights w;
        w.d.resize(c_fake.size());
        w.g.resize(c_fake.size());
        for (std::size_t i = 0; i < c_fake.size(); ++i) {
            const double d = gold::score(disc.d_g[i],
                                         disc.d_c.at(i, static_cast<std::size_t>(c_fake[i])),
                                         gold::Provenance::Generated, c_fake[i])
                                 .combined;
            w.d[i] = weight(d, cfg.beta_d, cfg.literal_beta0);
            w.g[i] = weight(d, cfg.beta_g, cfg.literal_beta0);
        }
        return w;
    };
    return cgan::train_step_hooked(model, labeled, unlabeled, cfg, rng, &hook);
}

// --- schedule driver -----------------------------------------------------------

namespace {

cgan::Batch draw_batch(const std::vector<data::LabeledPoint>& points, std::size_t n, Rng& rng,
                       bool with_labels) {
    cgan::Batch batch;
    if (points.empty() || n == 0) return batch;
    batch.x = Tensor2D(n, points[0].x.size());
    if (with_labels) batch.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(rng.below(points.size()));
        std::copy(points[idx].x.begin(), points[idx].x.end(), batch.x.row(i).begin());
        if (with_labels) batch.labels[i] = points[idx].label;
    }
    return batch;
}

}  // namespace

ScheduleResult run_schedule(cgan::CGanModel& model,
                            const std::vector<data::LabeledPoint>& labeled_data,
                            const std::vector<data::LabeledPoint>& unlabeled_data,
                            const cgan::TrainConfig& cfg, std::size_t trend_interval,
                            std::size_t trend_probe_n, Rng& rng, const StepCallback& on_step) {
    if (labeled_data.empty()) throw ConfigError("run_schedule: no labeled data");
    ScheduleResult result;
    Rng probe_rng = rng.fork(0x7e);
    const std::size_t total = cfg.total_steps();
    const double noise0 = cfg.instance_noise;
    const double noise_steps = 0.5 * static_cast<double>(total);
    for (std::size_t step = 1; step <= total; ++step) {
        const cgan::Batch labeled = draw_batch(labeled_data, cfg.batch_size, rng, true);
        const cgan::Batch unlabeled =
            draw_batch(unlabeled_data, unlabeled_data.empty() ? 0 : cfg.batch_size, rng, false);
        const bool reweighting = step > cfg.baseline_steps;
        cgan::TrainConfig step_cfg = cfg;
        // noise anneals linearly to zero over the first half of the run
        step_cfg.instance_noise =
            noise0 * std::max(0.0, 1.0 - static_cast<double>(step) / noise_steps);
        cgan::StepMetrics m =
            reweighting ? reweighted_train_step(model, labeled, unlabeled, step_cfg, rng)
                        : cgan::train_step(model, labeled, unlabeled, step_cfg, rng);
        result.metrics.push_back({step, m});
        if (on_step) on_step(step, m);
        if (trend_interval > 0 && step % trend_interval == 0)
            eval::log_trend(model, step, trend_probe_n, probe_rng, result.trend);
    }
    return result;
}

// --- rejection sampling -----------------------------------------------------------

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("quantile: empty sample");
    if (p < 0.0 || p >= 1.0) throw ConfigError("quantile: p must be in [0, 1)");
    std::sort(values.begin(), values.end());
    const double idx = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values[lo];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

double pullback(double r) {
    // logit of the clamped rate; exp(d_bal)/M = 1 at the batch max, which
    // must stay finite through the shift.
    const double q = std::min(1.0 - nn::kProbFloor, std::max(nn::kProbFloor, r));
    return std::log(q) - std::log(1.0 - q);
}

}  // namespace

double acceptance_rate(const gold::GoldScore& score, double m_const, double gamma) {
    if (m_const <= 0.0) throw ConfigError("acceptance_rate: M must be positive");
    const double r = std::exp(score.combined) / m_const;
    return nn::sigmoid(pullback(r) - gamma);
}

RejectionResult rejection_sample(const cgan::CGanModel& model,
                                 const std::vector<int>& class_targets,
                                 const RejectionConfig& cfg, Rng& rng) {
    if (class_targets.empty()) throw ConfigError("rejection_sample: no target classes");
    if (cfg.p < 0.0 || cfg.p >= 1.0) throw ConfigError("rejection_sample: p must be in [0, 1)");
    if (cfg.batch_size < 2) throw ConfigError("rejection_sample: batch_size must be >= 2");

    RejectionResult result;
    result.samples = Tensor2D(cfg.target_accept_count, model.cfg.data_dim);
    std::size_t accepted = 0;
    std::size_t starved_batches = 0;
    double sum_dbal_candidates = 0.0;
    double sum_dbal_accepted = 0.0;

    while (accepted < cfg.target_accept_count) {
        const std::size_t n = cfg.batch_size;
        const Tensor2D z = cgan::sample_latent(n, model.cfg.latent_dim, rng);
        std::vector<int> classes(n);
        for (auto& c : classes)
            c = class_targets[static_cast<std::size_t>(rng.below(class_targets.size()))];
        const Tensor2D x = cgan::generate(model, z, classes);
        const cgan::DiscOut disc = cgan::discriminate(model, x);

        std::vector<gold::GoldScore> raw(n);
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = gold::score(disc.d_g[i],
                                 disc.d_c.at(i, static_cast<std::size_t>(classes[i])),
                                 gold::Provenance::Generated, classes[i]);
        const gold::ScoreStats stats = gold::score_stats(raw);
        std::vector<gold::GoldScore> balanced(n);
        if (!stats.degenerate()) {
            for (std::size_t i = 0; i < n; ++i)
                balanced[i] = gold::score_balanced(
                    disc.d_g[i], disc.d_c.at(i, static_cast<std::size_t>(classes[i])),
                    gold::Provenance::Generated, stats, classes[i]);
        } else {
            balanced = raw;  // degenerate batch statistics: fall back to the raw estimator
            result.degenerate_stat_batches += 1;
        }

        double m_const = 0.0;
        for (const auto& s : balanced) m_const = std::max(m_const, std::exp(s.combined));
        std::vector<double> pulled(n);
        for (std::size_t i = 0; i < n; ++i)
            pulled[i] = pullback(std::exp(balanced[i].combined) / m_const);
        // p = 0 means no shift (gamma = 0, acceptance = raw rate), so the
        // batch max is accepted with probability 1 - eps.
        const double gamma = cfg.p > 0.0 ? quantile(pulled, cfg.p) : 0.0;

        std::size_t accepted_this_batch = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_dbal_candidates += balanced[i].combined;
            const double rate = nn::sigmoid(pulled[i] - gamma);
            const bool take = rng.uniform() < rate;
            result.candidates_seen += 1;
            if (!take || accepted >= cfg.target_accept_count) continue;
            std::copy(x.row(i).begin(), x.row(i).end(), result.samples.row(accepted).begin());
            result.classes.push_back(classes[i]);
            gold::ScoreRow row;
            row.sample_id = static_cast<std::uint32_t>(accepted);
            row.score = balanced[i];
            row.d_g = disc.d_g[i];
            row.d_c_or_entropy = disc.d_c.at(i, static_cast<std::size_t>(classes[i]));
            result.accepted_rows.push_back(row);
            sum_dbal_accepted += balanced[i].combined;
            ++accepted;
            ++accepted_this_batch;
        }

        const double batch_rate =
            static_cast<double>(accepted_this_batch) / static_cast<double>(n);
        starved_batches = batch_rate < 1e-4 ? starved_batches + 1 : 0;
        if (starved_batches >= 100)
            throw StarvationError(
                "rejection sampling starved: acceptance below 1e-4 for 100 consecutive "
                "batches; consider a lower p");
    }

    result.mean_dbal_candidates =
        sum_dbal_candidates / static_cast<double>(result.candidates_seen);
    result.mean_dbal_accepted = sum_dbal_accepted / static_cast<double>(accepted);
    return result;
}

std::vector<std::size_t> rejection_filter(std::span<const gold::ScoreRow> rows, double p,
                                          Rng& rng) {
    if (rows.empty()) throw ConfigError("rejection_filter: no score rows");
    double m_const = 0.0;
    for (const auto& row : rows) m_const = std::max(m_const, std::exp(row.score.combined));
    std::vector<double> pulled(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        pulled[i] = pullback(std::exp(rows[i].score.combined) / m_const);
    const double gamma = p > 0.0 ? quantile(pulled, p) : 0.0;
    std::vector<std::size_t> accepted;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rng.uniform() < nn::sigmoid(pulled[i] - gamma)) accepted.push_back(i);
    return accepted;
}

// --- active learning -----------------------------------------------------------------

PoolScores score_pool(const cgan::CGanModel& model, const data::SamplePool& pool,
                      bool balanced) {
    const auto& unlabeled = pool.unlabeled();
    if (unlabeled.empty()) throw StateError("score_pool: unlabeled pool is empty");
    Tensor2D x(unlabeled.size(), unlabeled[0].x.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i)
        std::copy(unlabeled[i].x.begin(), unlabeled[i].x.end(), x.row(i).begin());
    const cgan::DiscOut disc = cgan::discriminate(model, x);

    std::vector<gold::GoldScore> raw(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i)
        raw[i] = gold::score_unlabeled(disc.d_g[i], disc.d_c.row(i));

    PoolScores scores;
    scores.stats = gold::score_stats(raw);
    const bool use_balanced = balanced && !scores.stats.degenerate();
    scores.degenerate_stats = balanced && !use_balanced;

    scores.rows.resize(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        gold::ScoreRow row;
        row.sample_id = unlabeled[i].id;
        row.score = use_balanced
                        ? gold::score_unlabeled(disc.d_g[i], disc.d_c.row(i), &scores.stats)
                        : raw[i];
        row.d_g = disc.d_g[i];
        row.d_c_or_entropy = gold::entropy(disc.d_c.row(i));
        scores.rows[i] = row;
    }
    return scores;
}

std::vector<data::SampleId> top_k_ids(std::span<const gold::ScoreRow> rows, std::size_t k) {
    if (k > rows.size()) throw ConfigError("top_k_ids: k exceeds row count");
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a].score.combined != rows[b].score.combined)
            return rows[a].score.combined > rows[b].score.combined;
        return rows[a].sample_id < rows[b].sample_id;
    });
    std::vector<data::SampleId> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(rows[order[i]].sample_id);
    return out;
}

std::vector<data::SampleId> acquire_queries(const cgan::CGanModel& model,
                                            const data::SamplePool& pool, std::size_t k,
                                            bool balanced) {
    if (k > pool.unlabeled_size())
        throw ConfigError("acquire_queries: k exceeds unlabeled pool size");
    const PoolScores scores = score_pool(model, pool, balanced);
    return top_k_ids(scores.rows, k);
}

std::size_t ActiveTriplet::rounds() const {
    if (query_n == 0 || final_n < initial_n || (final_n - initial_n) % query_n != 0)
        throw ConfigError("active triplet (" + std::to_string(initial_n) + "," +
                          std::to_string(query_n) + "," + std::to_string(final_n) +
                          ") is not consistent");
    return (final_n - initial_n) / query_n;
}

ActiveState active_learning_run(data::SamplePool pool, const ActiveConfig& cfg, Rng& rng,
                                const RoundCallback& on_round) {
    const std::size_t rounds = cfg.triplet.rounds();
    if (pool.labeled_size() != cfg.triplet.initial_n)
        throw ConfigError("active_learning_run: pool labeled size " +
                          std::to_string(pool.labeled_size()) + " != triplet initial " +
                          std::to_string(cfg.triplet.initial_n));
    if (pool.test().size() <= cfg.val_n)
        throw ConfigError("active_learning_run: test split smaller than val_n");

    const std::vector<data::LabeledPoint> val(pool.test().begin(),
                                              pool.test().begin() +
                                                  static_cast<std::ptrdiff_t>(cfg.val_n));
    const std::vector<data::LabeledPoint> held_out(pool.test().begin() +
                                                       static_cast<std::ptrdiff_t>(cfg.val_n),
                                                   pool.test().end());

    cgan::CGanModel model = cgan::make_model(cfg.model, rng);
    Rng acq_rng = rng.fork(0xac);

    cgan::TrainConfig train_cfg;
    train_cfg.lambda_c = cfg.lambda_c;
    train_cfg.batch_size = cfg.batch_size;

    ActiveState state;
    state.triplet = cfg.triplet;

    for (std::size_t round = 0; round <= rounds; ++round) {
        // labeled / unlabeled views of the current pool
        std::vector<data::LabeledPoint> labeled_data(pool.labeled_size());
        for (std::size_t i = 0; i < pool.labeled_size(); ++i)
            labeled_data[i] = {pool.labeled()[i].x, pool.labeled_labels()[i]};
        std::vector<data::LabeledPoint> unlabeled_data(pool.unlabeled_size());
        for (std::size_t i = 0; i < pool.unlabeled_size(); ++i)
            unlabeled_data[i] = {pool.unlabeled()[i].x, 0};

        const std::size_t steps_per_epoch =
            std::max<std::size_t>(1, (unlabeled_data.size() + cfg.batch_size - 1) /
                                         cfg.batch_size);

        cgan::CGanModel best_model = model;
        double best_val = -1.0;
        std::uint64_t eval_stream = 0;
        for (std::size_t epoch = 1; epoch <= cfg.epochs_per_round; ++epoch) {
            for (std::size_t s = 0; s < steps_per_epoch; ++s) {
                const cgan::Batch labeled = draw_batch(labeled_data, cfg.batch_size, rng, true);
                const cgan::Batch unlabeled =
                    draw_batch(unlabeled_data, unlabeled_data.empty() ? 0 : cfg.batch_size, rng,
                               false);
                cgan::train_step(model, labeled, unlabeled, train_cfg, rng);
            }
            if (epoch % cfg.eval_interval_epochs == 0 || epoch == cfg.epochs_per_round) {
                eval::EvalConfig sel = cfg.selection_eval;
                sel.seed = Rng::derive_seed(cfg.seed, (round << 16) | eval_stream++);
                const double val_cap = eval::fitting_capacity(model, val, sel).accuracy;
                if (val_cap > best_val) {
                    best_val = val_cap;
                    best_model = model;
                }
            }
        }
        model = best_model;

        eval::EvalConfig fin = cfg.final_eval;
        fin.seed = Rng::derive_seed(cfg.seed, 0xf000 + round);
        const double capacity = eval::fitting_capacity(model, held_out, fin).accuracy;

        RoundRecord record;
        record.round = round;
        record.labeled_size = pool.labeled_size();
        record.fitting_capacity = capacity;
        record.best_val_capacity = best_val;

        PoolScores scores;
        if (pool.unlabeled_size() >= 2) {
            scores = score_pool(model, pool, cfg.balanced);
            record.sigma_g = scores.stats.sigma_marginal;
            record.sigma_c = scores.stats.sigma_conditional;
        }

        if (round < rounds) {
            if (cfg.triplet.query_n > pool.unlabeled_size())
                throw ConfigError("active_learning_run: unlabeled pool exhausted");
            std::vector<data::SampleId> selected;
            if (cfg.random_acquisition) {
                std::vector<data::SampleId> ids;
                ids.reserve(pool.unlabeled_size());
                for (const auto& s : pool.unlabeled()) ids.push_back(s.id);
                acq_rng.shuffle(ids);
                selected.assign(ids.begin(),
                                ids.begin() + static_cast<std::ptrdiff_t>(cfg.triplet.query_n));
            } else if (!scores.rows.empty()) {
                selected = top_k_ids(scores.rows, cfg.triplet.query_n);
            } else {
                // single-sample pool: nothing to rank
                for (std::size_t i = 0; i < cfg.triplet.query_n; ++i)
                    selected.push_back(pool.unlabeled()[i].id);
            }
            record.selected = selected;
        }

        // callback sees the pool snapshot the scores were computed on
        if (on_round) on_round(record, pool, scores, model);

        if (round < rounds) {
            for (data::SampleId id : record.selected) pool.label_query(id);
            cgan::reinit_discriminator(model, rng);
        }
        state.history.push_back(std::move(record));
    }

    state.best_model = std::move(model);
    return state;
}

}  // namespace goldlab::apps
