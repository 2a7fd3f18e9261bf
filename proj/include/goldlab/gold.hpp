#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "goldlab/mixture.hpp"

namespace goldlab::gold {

enum class Provenance : std::uint8_t { Real = 0, Generated = 1, Unlabeled = 2 };

const char* provenance_name(Provenance p);

// Per-sample gap-of-log-densities estimate. `conditional` stores the signed
// contribution, so combined = marginal + conditional for every provenance:
// generated samples get +log D_C(c|x) (<= 0), real samples get -log D_C(c|x)
// (>= 0), unlabeled samples get the entropy of the class posterior (>= 0).
struct GoldScore {
    double marginal = 0.0;
    double conditional = 0.0;
    double combined = 0.0;
    Provenance provenance = Provenance::Real;
    std::optional<int> label;
};

// Spread of the two estimator terms over a sample set. sigma_conditional is
// taken over conditional-term magnitudes so it does not depend on the
// provenance-driven sign flip (for unlabeled scores the magnitude is the
// entropy itself).
struct ScoreStats {
    double sigma_marginal = 0.0;
    double sigma_conditional = 0.0;
    std::size_t n = 0;

    // Spreads below this are accumulated rounding noise from identical terms,
    // not real variation; the balanced estimator must not divide by them.
    static constexpr double kDegenerateSigma = 1e-9;
    bool degenerate() const { return sigma_conditional < kDegenerateSigma; }
};

// Raw estimator from discriminator outputs. Inputs are clamped into
// [1e-7, 1 - 1e-7] before the logs. Provenance must be Real or Generated.
GoldScore score(double d_g, double d_c_at_label, Provenance provenance,
                std::optional<int> label = std::nullopt);

// Balanced variant: conditional term rescaled by sigma_marginal /
// sigma_conditional. Throws NumericError when sigma_conditional = 0.
GoldScore score_balanced(double d_g, double d_c_at_label, Provenance provenance,
                         const ScoreStats& stats, std::optional<int> label = std::nullopt);

// Shannon entropy, natural log, 0 log 0 = 0.
double entropy(std::span<const double> distribution);

// Estimator for unlabeled real samples: the unknown-label conditional term is
// replaced by the entropy of the class posterior; with `stats` present the
// entropy term is rescaled by sigma_marginal / sigma_conditional (which must
// then be the spread of entropy terms over the pool).
GoldScore score_unlabeled(double d_g, std::span<const double> d_c,
                          const ScoreStats* stats = nullptr);

// Population standard deviations over >= 2 scores.
ScoreStats score_stats(std::span<const GoldScore> scores);

// Ground-truth cross-check against two analytic mixtures: the Bayes-optimal
// real/generated discriminator D*(x) = p_data(x) / (p_data(x) + p_g(x)) must
// reproduce the exact marginal log-ratio through the estimator's logit form.
struct OracleGap {
    double true_gap;            // log p_data(x, c) - log p_g(x, c)
    double exact_marginal;      // log(p_data(x) / p_g(x))
    double surrogate_marginal;  // log(D* / (1 - D*))
    double exact_conditional;   // log(p_data(c|x) / p_g(c|x))
};

OracleGap oracle_check(const data::SyntheticMixture& data_mix,
                       const data::SyntheticMixture& model_mix,
                       const std::array<double, 2>& x, int label);

// --- score dump / import ----------------------------------------------------
// CSV schema (also the import format for filter-only rejection):
//   sample_id,provenance,class,d_g,d_c_at_label_or_entropy,marginal,conditional,combined

struct ScoreRow {
    std::uint32_t sample_id = 0;
    GoldScore score;
    double d_g = 0.0;
    double d_c_or_entropy = 0.0;  // class probability at label, or posterior entropy
};

void write_scores_csv(std::ostream& out, std::span<const ScoreRow> rows);
std::vector<ScoreRow> read_scores_csv(std::istream& in);

}  // namespace goldlab::gold
