#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "goldlab/cgan.hpp"
#include "goldlab/gold.hpp"
#include "goldlab/mixture.hpp"

namespace goldlab::eval {

struct EvalConfig {
    std::size_t epochs = 40;
    std::size_t samples_per_epoch = 2000;
    std::size_t batch_size = 64;
    std::size_t hidden = 64;
    double lr = 1e-3;
    double adam_beta1 = 0.9;
    std::uint64_t seed = 0;
    // Generated-samples-per-epoch relative to the full-scale protocol's
    // 10,000; recorded in every report.
    double scale_factor() const { return static_cast<double>(samples_per_epoch) / 10000.0; }
};

struct FittingCapacityReport {
    double accuracy = 0.0;
    std::vector<double> per_class_accuracy;
    std::vector<std::size_t> per_class_counts;
    std::vector<double> per_epoch_accuracy;
    std::size_t classifier_epochs = 0;
    std::size_t samples_per_epoch = 0;
    std::uint64_t seed = 0;
    double scale_factor = 0.0;
    bool degenerate_generator = false;
    bool chance_level_warning = false;
};

// Stream of (sample, conditioning class) pairs used to train the evaluation
// classifier. Keeping the classifier behind this interface means it can never
// see real training samples unless a test deliberately wires them in.
using SampleSource = std::function<cgan::Batch(std::size_t n, Rng& rng)>;

FittingCapacityReport fitting_capacity_from_source(const SampleSource& source,
                                                   std::size_t data_dim, int class_count,
                                                   const std::vector<data::LabeledPoint>& test,
                                                   const EvalConfig& cfg);

// Accuracy on the real test set of a fresh classifier trained only on
// generated samples (fresh draws every epoch).
FittingCapacityReport fitting_capacity(const cgan::CGanModel& model,
                                       const std::vector<data::LabeledPoint>& test,
                                       const EvalConfig& cfg);

// --- estimator trend over training ------------------------------------------

struct TrendPoint {
    std::size_t step = 0;
    double mean_combined = 0.0;
    double mean_marginal = 0.0;
    double mean_conditional = 0.0;
    double sigma_g = 0.0;
    double sigma_c = 0.0;
};

struct TrendLog {
    std::vector<TrendPoint> points;
};

// Scores a fresh generated probe batch with the raw estimator and appends the
// means and spreads for `step`.
void log_trend(const cgan::CGanModel& model, std::size_t step, std::size_t probe_n, Rng& rng,
               TrendLog& log);

// --- histograms ----------------------------------------------------------------

struct HistogramSeries {
    double lo = 0.0;
    double width = 0.0;
    std::vector<std::size_t> counts;
};

struct HistogramTable {
    HistogramSeries marginal;
    HistogramSeries conditional;
};

// Equal-width bins spanning [min, max] of each term.
HistogramTable export_histogram(std::span<const gold::GoldScore> scores, std::size_t bins);

// --- csv ------------------------------------------------------------------------
// Every file starts with "# config_hash=<hex>" for provenance.

void write_trend_csv(std::ostream& out, const TrendLog& log, std::uint64_t config_hash);
TrendLog read_trend_csv(std::istream& in);
void write_histogram_csv(std::ostream& out, const HistogramTable& table,
                         std::uint64_t config_hash);
HistogramTable read_histogram_csv(std::istream& in);

}  // namespace goldlab::eval
