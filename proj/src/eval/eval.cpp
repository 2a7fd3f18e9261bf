#include "goldlab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "goldlab/errors.hpp"

namespace goldlab::eval {

namespace {

// argmax over a softmax row, lowest index wins ties
int predict_row(const Tensor2D& probs, std::size_t r) {
    int best = 0;
    double best_p = probs.at(r, 0);
    for (std::size_t j = 1; j < probs.cols; ++j) {
        if (probs.at(r, j) > best_p) {
            best_p = probs.at(r, j);
            best = static_cast<int>(j);
        }
    }
    return best;
}

double test_accuracy(const nn::Network& clf, const std::vector<data::LabeledPoint>& test) {
    if (test.empty()) return 0.0;
    Tensor2D x(test.size(), test[0].x.size());
    for (std::size_t i = 0; i < test.size(); ++i)
        std::copy(test[i].x.begin(), test[i].x.end(), x.row(i).begin());
    const Tensor2D probs = clf.forward(x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i)
        if (predict_row(probs, i) == test[i].label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace

FittingCapacityReport fitting_capacity_from_source(const SampleSource& source,
                                                   std::size_t data_dim, int class_count,
                                                   const std::vector<data::LabeledPoint>& test,
                                                   const EvalConfig& cfg) {
    if (test.empty()) throw ConfigError("fitting_capacity: empty test set");
    Rng rng(cfg.seed);

    FittingCapacityReport report;
    report.classifier_epochs = cfg.epochs;
    report.samples_per_epoch = cfg.samples_per_epoch;
    report.seed = cfg.seed;
    report.scale_factor = cfg.scale_factor();

    // Degenerate-generator probe: a collapsed source cannot carry class signal.
    {
        cgan::Batch probe = source(64, rng);
        double max_dev = 0.0;
        for (std::size_t r = 1; r < probe.x.rows; ++r)
            for (std::size_t c = 0; c < probe.x.cols; ++c)
                max_dev = std::max(max_dev, std::abs(probe.x.at(r, c) - probe.x.at(0, c)));
        report.degenerate_generator = probe.x.rows > 1 && max_dev < 1e-9;
    }

    nn::Network clf;
    clf.append(nn::make_dense(rng, data_dim, cfg.hidden, nn::Activation::Relu));
    clf.append(nn::make_dense(rng, cfg.hidden, static_cast<std::size_t>(class_count),
                              nn::Activation::Softmax));
    nn::AdamState state =
        nn::AdamState::for_network(clf, nn::AdamConfig{cfg.lr, cfg.adam_beta1, 0.999, 1e-8});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::size_t remaining = cfg.samples_per_epoch;
        while (remaining > 0) {
            const std::size_t n = std::min(cfg.batch_size, remaining);
            remaining -= n;
            cgan::Batch batch = source(n, rng);
            nn::ForwardCache cache;
            const Tensor2D probs = clf.forward(batch.x, &cache);
            Tensor2D seed(n, probs.cols);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < probs.cols; ++j)
                    seed.at(i, j) = probs.at(i, j) / static_cast<double>(n);
                seed.at(i, static_cast<std::size_t>(batch.labels[i])) -=
                    1.0 / static_cast<double>(n);
            }
            nn::NetGrads grads = clf.backward_from_logits(cache, seed);
            nn::adam_step(clf, grads, state);
        }
        report.per_epoch_accuracy.push_back(test_accuracy(clf, test));
    }

    // Final-epoch accuracy is the headline number; the curve stays in the report.
    report.accuracy = report.per_epoch_accuracy.empty() ? 0.0 : report.per_epoch_accuracy.back();

    report.per_class_accuracy.assign(static_cast<std::size_t>(class_count), 0.0);
    report.per_class_counts.assign(static_cast<std::size_t>(class_count), 0);
    {
        Tensor2D x(test.size(), data_dim);
        for (std::size_t i = 0; i < test.size(); ++i)
            std::copy(test[i].x.begin(), test[i].x.end(), x.row(i).begin());
        const Tensor2D probs = clf.forward(x);
        for (std::size_t i = 0; i < test.size(); ++i) {
            const auto cls = static_cast<std::size_t>(test[i].label);
            report.per_class_counts[cls] += 1;
            if (predict_row(probs, i) == test[i].label) report.per_class_accuracy[cls] += 1.0;
        }
        for (std::size_t c = 0; c < report.per_class_accuracy.size(); ++c)
            if (report.per_class_counts[c] > 0)
                report.per_class_accuracy[c] /= static_cast<double>(report.per_class_counts[c]);
    }

    report.chance_level_warning =
        report.accuracy < 1.0 / static_cast<double>(class_count) + 0.05;
    return report;
}

FittingCapacityReport fitting_capacity(const cgan::CGanModel& model,
                                       const std::vector<data::LabeledPoint>& test,
                                       const EvalConfig& cfg) {
    SampleSource source = [&model](std::size_t n, Rng& rng) {
        cgan::Batch batch;
        const Tensor2D z = cgan::sample_latent(n, model.cfg.latent_dim, rng);
        batch.labels = cgan::sample_classes(n, model.cfg.class_count, rng);
        batch.x = cgan::generate(model, z, batch.labels);
        return batch;
    };
    return fitting_capacity_from_source(source, model.cfg.data_dim, model.cfg.class_count, test,
                                        cfg);
}

void log_trend(const cgan::CGanModel& model, std::size_t step, std::size_t probe_n, Rng& rng,
               TrendLog& log) {
    if (!log.points.empty() && log.points.back().step >= step)
        throw StateError("log_trend: steps must be strictly increasing");
    const Tensor2D z = cgan::sample_latent(probe_n, model.cfg.latent_dim, rng);
    const std::vector<int> classes = cgan::sample_classes(probe_n, model.cfg.class_count, rng);
    const Tensor2D x = cgan::generate(model, z, classes);
    const cgan::DiscOut disc = cgan::discriminate(model, x);
    std::vector<gold::GoldScore> scores;
    scores.reserve(probe_n);
    for (std::size_t i = 0; i < probe_n; ++i)
        scores.push_back(gold::score(disc.d_g[i],
                                     disc.d_c.at(i, static_cast<std::size_t>(classes[i])),
                                     gold::Provenance::Generated, classes[i]));
    TrendPoint pt;
    pt.step = step;
    for (const auto& s : scores) {
        pt.mean_combined += s.combined;
        pt.mean_marginal += s.marginal;
        pt.mean_conditional += s.conditional;
    }
    const double n = static_cast<double>(scores.size());
    pt.mean_combined /= n;
    pt.mean_marginal /= n;
    pt.mean_conditional /= n;
    const gold::ScoreStats stats = gold::score_stats(scores);
    pt.sigma_g = stats.sigma_marginal;
    pt.sigma_c = stats.sigma_conditional;
    log.points.push_back(pt);
}

namespace {

HistogramSeries histogram_of(std::vector<double> values, std::size_t bins) {
    HistogramSeries series;
    series.counts.assign(bins, 0);
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    series.lo = *mn_it;
    const double span = *mx_it - *mn_it;
    series.width = span > 0.0 ? span / static_cast<double>(bins) : 1.0;
    for (double v : values) {
        auto bin = static_cast<std::size_t>((v - series.lo) / series.width);
        if (bin >= bins) bin = bins - 1;  // right edge lands in the last bin
        series.counts[bin] += 1;
    }
    return series;
}

}  // namespace

HistogramTable export_histogram(std::span<const gold::GoldScore> scores, std::size_t bins) {
    if (scores.empty()) throw ConfigError("export_histogram: no scores");
    if (bins == 0) throw ConfigError("export_histogram: bins must be >= 1");
    std::vector<double> marginals, conditionals;
    marginals.reserve(scores.size());
    conditionals.reserve(scores.size());
    for (const auto& s : scores) {
        marginals.push_back(s.marginal);
        conditionals.push_back(s.conditional);
    }
    HistogramTable table;
    table.marginal = histogram_of(std::move(marginals), bins);
    table.conditional = histogram_of(std::move(conditionals), bins);
    return table;
}

// --- csv ---------------------------------------------------------------------------

void write_trend_csv(std::ostream& out, const TrendLog& log, std::uint64_t config_hash) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# config_hash=%016llx\n",
                  static_cast<unsigned long long>(config_hash));
    out << buf;
    out << "step,mean_gold,mean_marginal,mean_conditional,sigma_g,sigma_c\n";
    for (const auto& pt : log.points) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", pt.step,
                      pt.mean_combined, pt.mean_marginal, pt.mean_conditional, pt.sigma_g,
                      pt.sigma_c);
        out << buf;
    }
}

TrendLog read_trend_csv(std::istream& in) {
    TrendLog log;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("step,", 0) != 0)
                throw FormatError("trend csv: missing header on line " + std::to_string(lineno));
            header_seen = true;
            continue;
        }
        TrendPoint pt;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
        if (vals.size() != 6)
            throw FormatError("trend csv: expected 6 columns on line " + std::to_string(lineno));
        pt.step = static_cast<std::size_t>(vals[0]);
        pt.mean_combined = vals[1];
        pt.mean_marginal = vals[2];
        pt.mean_conditional = vals[3];
        pt.sigma_g = vals[4];
        pt.sigma_c = vals[5];
        log.points.push_back(pt);
    }
    return log;
}

void write_histogram_csv(std::ostream& out, const HistogramTable& table,
                         std::uint64_t config_hash) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# config_hash=%016llx\n",
                  static_cast<unsigned long long>(config_hash));
    out << buf;
    out << "term,bin_lo,bin_hi,count\n";
    const auto emit = [&](const char* term, const HistogramSeries& s) {
        for (std::size_t b = 0; b < s.counts.size(); ++b) {
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%zu\n", term,
                          s.lo + s.width * static_cast<double>(b),
                          s.lo + s.width * static_cast<double>(b + 1), s.counts[b]);
            out << buf;
        }
    };
    emit("marginal", table.marginal);
    emit("conditional", table.conditional);
}

HistogramTable read_histogram_csv(std::istream& in) {
    HistogramTable table;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("term,", 0) != 0)
                throw FormatError("histogram csv: missing header on line " +
                                  std::to_string(lineno));
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string term, lo_s, hi_s, count_s;
        std::getline(ss, term, ',');
        std::getline(ss, lo_s, ',');
        std::getline(ss, hi_s, ',');
        std::getline(ss, count_s, ',');
        HistogramSeries* series = nullptr;
        if (term == "marginal") series = &table.marginal;
        else if (term == "conditional") series = &table.conditional;
        else throw FormatError("histogram csv: bad term '" + term + "' on line " +
                               std::to_string(lineno));
        const double lo = std::stod(lo_s);
        const double hi = std::stod(hi_s);
        if (series->counts.empty()) {
            series->lo = lo;
            series->width = hi - lo;
        }
        series->counts.push_back(static_cast<std::size_t>(std::stoull(count_s)));
    }
    return table;
}

}  // namespace goldlab::eval
