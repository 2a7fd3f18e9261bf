#include "goldlab/gold.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "goldlab/errors.hpp"
#include "goldlab/nn.hpp"

namespace goldlab::gold {

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Real: return "real";
        case Provenance::Generated: return "generated";
        case Provenance::Unlabeled: return "unlabeled";
    }
    return "?";
}

namespace {

double logit(double p) {
    const double q = nn::clamp_prob(p);
    return std::log(q) - std::log(1.0 - q);
}

GoldScore assemble(double marginal, double conditional, Provenance prov,
                   std::optional<int> label) {
    // Sign convention: real conditional contribution >= 0, generated <= 0.
    if (prov == Provenance::Real && conditional < 0.0)
        throw NumericError("gold: real-sample conditional term fell below 0");
    if (prov == Provenance::Generated && conditional > 0.0)
        throw NumericError("gold: generated-sample conditional term rose above 0");
    GoldScore s;
    s.marginal = marginal;
    s.conditional = conditional;
    s.combined = marginal + conditional;
    s.provenance = prov;
    s.label = label;
    return s;
}

}  // namespace

GoldScore score(double d_g, double d_c_at_label, Provenance provenance,
                std::optional<int> label) {
    if (provenance == Provenance::Unlabeled)
        throw StateError("gold: use score_unlabeled for unlabeled samples");
    const double marginal = logit(d_g);
    // The conditional term only ever takes log(p), so only the low side needs
    // clamping; a perfectly classified sample contributes exactly zero.
    const double log_dc = std::log(std::max(d_c_at_label, nn::kProbFloor));
    const double conditional = provenance == Provenance::Generated ? log_dc : -log_dc;
    return assemble(marginal, conditional, provenance, label);
}

GoldScore score_balanced(double d_g, double d_c_at_label, Provenance provenance,
                         const ScoreStats& stats, std::optional<int> label) {
    if (stats.degenerate())
        throw NumericError("gold balanced: sigma_C = 0 (degenerate statistics)");
    GoldScore s = score(d_g, d_c_at_label, provenance, label);
    s.conditional *= stats.sigma_marginal / stats.sigma_conditional;
    s.combined = s.marginal + s.conditional;
    return s;
}

double entropy(std::span<const double> distribution) {
    double h = 0.0;
    for (double p : distribution) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

GoldScore score_unlabeled(double d_g, std::span<const double> d_c, const ScoreStats* stats) {
    double h = entropy(d_c);
    if (stats) {
        if (stats->degenerate())
            throw NumericError("gold unlabeled balanced: sigma_C = 0 (degenerate statistics)");
        h *= stats->sigma_marginal / stats->sigma_conditional;
    }
    GoldScore s;
    s.marginal = logit(d_g);
    s.conditional = h;
    s.combined = s.marginal + s.conditional;
    s.provenance = Provenance::Unlabeled;
    return s;
}

ScoreStats score_stats(std::span<const GoldScore> scores) {
    if (scores.size() < 2)
        throw NumericError("score_stats: need at least 2 scores, got " +
                           std::to_string(scores.size()));
    double mean_m = 0.0, mean_c = 0.0;
    for (const auto& s : scores) {
        mean_m += s.marginal;
        mean_c += std::abs(s.conditional);
    }
    const double n = static_cast<double>(scores.size());
    mean_m /= n;
    mean_c /= n;
    double var_m = 0.0, var_c = 0.0;
    for (const auto& s : scores) {
        const double dm = s.marginal - mean_m;
        const double dc = std::abs(s.conditional) - mean_c;
        var_m += dm * dm;
        var_c += dc * dc;
    }
    ScoreStats st;
    st.sigma_marginal = std::sqrt(var_m / n);
    st.sigma_conditional = std::sqrt(var_c / n);
    st.n = scores.size();
    return st;
}

OracleGap oracle_check(const data::SyntheticMixture& data_mix,
                       const data::SyntheticMixture& model_mix,
                       const std::array<double, 2>& x, int label) {
    const auto pd = data_mix.log_density(x);
    const auto pg = model_mix.log_density(x);
    OracleGap gap;
    gap.true_gap = pd.log_joint[label] - pg.log_joint[label];
    gap.exact_marginal = pd.log_px - pg.log_px;
    // Literal construction of the optimal discriminator in density space.
    const double dens_d = std::exp(pd.log_px);
    const double dens_g = std::exp(pg.log_px);
    const double d_star = dens_d / (dens_d + dens_g);
    gap.surrogate_marginal = std::log(d_star) - std::log(1.0 - d_star);
    gap.exact_conditional = pd.log_posterior[label] - pg.log_posterior[label];
    return gap;
}

// --- csv ---------------------------------------------------------------------

namespace {

Provenance parse_provenance(const std::string& s, std::size_t line) {
    if (s == "real") return Provenance::Real;
    if (s == "generated") return Provenance::Generated;
    if (s == "unlabeled") return Provenance::Unlabeled;
    throw FormatError("scores csv: bad provenance '" + s + "' on line " + std::to_string(line));
}

}  // namespace

void write_scores_csv(std::ostream& out, std::span<const ScoreRow> rows) {
    out << "sample_id,provenance,class,d_g,d_c_at_label_or_entropy,marginal,conditional,"
           "combined\n";
    char buf[256];
    for (const auto& row : rows) {
        const int cls = row.score.label ? *row.score.label : -1;
        std::snprintf(buf, sizeof(buf), "%u,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      row.sample_id, provenance_name(row.score.provenance), cls, row.d_g,
                      row.d_c_or_entropy, row.score.marginal, row.score.conditional,
                      row.score.combined);
        out << buf;
    }
}

std::vector<ScoreRow> read_scores_csv(std::istream& in) {
    std::vector<ScoreRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;  // header
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8)
            throw FormatError("scores csv: expected 8 columns, got " +
                              std::to_string(fields.size()) + " on line " +
                              std::to_string(lineno));
        ScoreRow row;
        row.sample_id = static_cast<std::uint32_t>(std::stoul(fields[0]));
        row.score.provenance = parse_provenance(fields[1], lineno);
        const int cls = std::stoi(fields[2]);
        if (cls >= 0) row.score.label = cls;
        row.d_g = std::stod(fields[3]);
        row.d_c_or_entropy = std::stod(fields[4]);
        row.score.marginal = std::stod(fields[5]);
        row.score.conditional = std::stod(fields[6]);
        row.score.combined = std::stod(fields[7]);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace goldlab::gold
