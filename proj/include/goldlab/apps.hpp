#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "goldlab/cgan.hpp"
#include "goldlab/eval.hpp"
#include "goldlab/gold.hpp"
#include "goldlab/pool.hpp"

namespace goldlab::apps {

// Signed power weight for the re-weighted losses: |d|^beta * sign(d) for
// beta > 0. beta = 0 means weight 1 (baseline recovery); the literal reading
// of the power rule (sign(d)) sits behind literal_beta0.
double weight(double d, double beta, bool literal_beta0 = false);

// Baseline step with the generated-sample terms of both losses multiplied by
// weight(d(G(z,c), c); beta). Weights come from the pre-update discriminator
// on the step's own fake batch and are constants w.r.t. the optimization;
// beta_d applies to the discriminator update, beta_g to the generator update.
cgan::StepMetrics reweighted_train_step(cgan::CGanModel& model, const cgan::Batch& labeled,
                                        const cgan::Batch& unlabeled,
                                        const cgan::TrainConfig& cfg, Rng& rng);

// --- training schedule driver -------------------------------------------------

struct StepRow {
    std::size_t step = 0;
    cgan::StepMetrics metrics;
};

struct ScheduleResult {
    std::vector<StepRow> metrics;
    eval::TrendLog trend;
};

using StepCallback = std::function<void(std::size_t step, const cgan::StepMetrics&)>;

// Baseline phase for cfg.baseline_steps steps, then the re-weighting phase
// for cfg.reweight_steps steps; minibatches drawn with replacement. The trend
// probe uses a forked rng stream so the training stream does not depend on
// the logging interval.
ScheduleResult run_schedule(cgan::CGanModel& model,
                            const std::vector<data::LabeledPoint>& labeled_data,
                            const std::vector<data::LabeledPoint>& unlabeled_data,
                            const cgan::TrainConfig& cfg, std::size_t trend_interval,
                            std::size_t trend_probe_n, Rng& rng,
                            const StepCallback& on_step = nullptr);

// --- rejection sampling ----------------------------------------------------------

struct RejectionConfig {
    double p = 0.5;  // percentile for the acceptance shift
    std::size_t batch_size = 512;
    std::size_t target_accept_count = 1000;
};

// Linear-interpolation quantile between order statistics.
double quantile(std::vector<double> values, double p);

// Shifted acceptance rate for one balanced score: r = exp(combined) / M,
// then f(f^-1(r) - gamma) with f the logistic sigmoid. r is clamped below 1
// so the pullback stays finite.
double acceptance_rate(const gold::GoldScore& score, double m_const, double gamma);

struct RejectionResult {
    Tensor2D samples;  // accepted, target_accept_count rows
    std::vector<int> classes;
    std::vector<gold::ScoreRow> accepted_rows;
    std::size_t candidates_seen = 0;
    double mean_dbal_accepted = 0.0;
    double mean_dbal_candidates = 0.0;
    std::size_t degenerate_stat_batches = 0;  // raw-score fallbacks (sigma_C = 0)
};

// Draws candidate batches conditioned on classes from `class_targets`, scores
// them with the balanced estimator (per-batch statistics), sets M to the
// batch max of exp(d_bal) and gamma to the p-th percentile of the pulled-back
// logits, then accepts with the shifted rate until target_accept_count
// samples are in hand. Throws StarvationError when acceptance stays below
// 1e-4 for 100 consecutive batches.
RejectionResult rejection_sample(const cgan::CGanModel& model,
                                 const std::vector<int>& class_targets,
                                 const RejectionConfig& cfg, Rng& rng);

// Filter-only variant over precomputed score rows (the score CSV import
// path): one batch, no model needed. Returns accepted row indices.
std::vector<std::size_t> rejection_filter(std::span<const gold::ScoreRow> rows, double p,
                                          Rng& rng);

// --- active learning ----------------------------------------------------------------

struct PoolScores {
    std::vector<gold::ScoreRow> rows;  // one per unlabeled sample, pool order
    gold::ScoreStats stats;            // over the full pool
    bool degenerate_stats = false;     // balanced requested but sigma_C = 0
};

PoolScores score_pool(const cgan::CGanModel& model, const data::SamplePool& pool,
                      bool balanced);

// Top-k by combined score, ties broken by sample id ascending.
std::vector<data::SampleId> top_k_ids(std::span<const gold::ScoreRow> rows, std::size_t k);

// Top-k unlabeled sample ids by the unlabeled estimator, ties broken by id
// ascending. Statistics for the balanced variant are taken over the full pool.
std::vector<data::SampleId> acquire_queries(const cgan::CGanModel& model,
                                            const data::SamplePool& pool, std::size_t k,
                                            bool balanced);

struct ActiveTriplet {
    std::size_t initial_n = 4;
    std::size_t query_n = 1;
    std::size_t final_n = 8;

    std::size_t rounds() const;  // (final - initial) / query, validated
};

struct ActiveConfig {
    ActiveTriplet triplet;
    std::size_t epochs_per_round = 100;
    std::size_t batch_size = 64;
    double lambda_c = 0.01;
    bool balanced = true;             // balanced estimator for acquisition
    bool random_acquisition = false;  // baseline arm
    std::size_t val_n = 100;          // carved off the front of pool.test()
    std::size_t eval_interval_epochs = 10;
    eval::EvalConfig selection_eval{10, 500, 64, 64, 1e-3, 0.9, 0};
    eval::EvalConfig final_eval{40, 2000, 64, 64, 1e-3, 0.9, 0};
    cgan::ModelConfig model;
    std::uint64_t seed = 0;
};

struct RoundRecord {
    std::size_t round = 0;
    std::size_t labeled_size = 0;
    std::vector<data::SampleId> selected;  // queries chosen after this round
    double fitting_capacity = 0.0;         // best-val model on the held-out test
    double best_val_capacity = 0.0;
    double sigma_g = 0.0;
    double sigma_c = 0.0;
};

struct ActiveState {
    ActiveTriplet triplet;
    std::vector<RoundRecord> history;  // rounds + 1 entries
    cgan::CGanModel best_model;
};

using RoundCallback =
    std::function<void(const RoundRecord&, const data::SamplePool&, const PoolScores&,
                       const cgan::CGanModel&)>;

// Per round: semi-supervised training (all unlabeled data in the GAN terms),
// best-validation-capacity checkpoint selection, pool scoring, query
// acquisition, then keep-G/re-init-D. The validation split is the first
// val_n test samples; capacities are reported on the remainder.
ActiveState active_learning_run(data::SamplePool pool, const ActiveConfig& cfg, Rng& rng,
                                const RoundCallback& on_round = nullptr);

}  // namespace goldlab::apps
