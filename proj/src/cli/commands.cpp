#include "goldlab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "goldlab/errors.hpp"
#include "goldlab/idx.hpp"
#include "goldlab/manifest.hpp"
#include "goldlab/pool.hpp"
#include "goldlab/svg.hpp"

namespace goldlab::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Dataset {
    std::vector<data::LabeledPoint> train;
    std::vector<data::LabeledPoint> test;
    int class_count = 2;
    std::size_t dim = 2;
    data::Standardizer standardizer;
    bool standardized = false;
};

Dataset build_dataset(const ExperimentConfig& cfg, Rng& rng) {
    Dataset ds;
    if (cfg.data.kind == "synthetic") {
        const data::SyntheticMixture mixture = mixture_from_config(cfg.data);
        ds.train = mixture.sample(cfg.data.train_n, rng);
        ds.test = mixture.sample(cfg.data.test_n, rng);
        ds.class_count = mixture.class_count();
        ds.dim = 2;
    } else {
        ds.train = data::load_idx(cfg.data.images, cfg.data.labels);
        ds.test = data::load_idx(cfg.data.test_images, cfg.data.test_labels);
        if (ds.train.size() > cfg.data.train_limit) ds.train.resize(cfg.data.train_limit);
        if (ds.test.size() > cfg.data.test_limit) ds.test.resize(cfg.data.test_limit);
        if (ds.train.empty()) throw ConfigError("idx training set is empty");
        ds.dim = ds.train[0].x.size();
        int k = 0;
        for (const auto& p : ds.train) k = std::max(k, p.label + 1);
        for (const auto& p : ds.test) k = std::max(k, p.label + 1);
        ds.class_count = k;
    }
    if (cfg.data.standardize) {
        ds.standardizer = data::Standardizer::fit(ds.train);
        ds.standardizer.apply_in_place(ds.train);
        ds.standardizer.apply_in_place(ds.test);
        ds.standardized = true;
    }
    return ds;
}

cgan::ModelConfig model_config_for(const ExperimentConfig& cfg, const Dataset& ds) {
    cgan::ModelConfig mc = cfg.model;
    mc.data_dim = ds.dim;
    mc.class_count = ds.class_count;
    return mc;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot write " + path);
    out << text;
}

void write_points_csv(const std::string& path, const std::vector<data::LabeledPoint>& points,
                      const data::Standardizer* inverse, std::uint64_t hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot write " + path);
    out << "# config_hash=" << hash_hex(hash) << "\n";
    const std::size_t dim = points.empty() ? 2 : points[0].x.size();
    for (std::size_t j = 1; j <= dim; ++j) out << "x" << j << ",";
    out << "class\n";
    char buf[64];
    for (const auto& p : points) {
        const std::vector<double> x = inverse ? inverse->invert(p.x) : p.x;
        for (double v : x) {
            std::snprintf(buf, sizeof(buf), "%.17g,", v);
            out << buf;
        }
        out << p.label << "\n";
    }
}

std::vector<data::LabeledPoint> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<data::LabeledPoint> points;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2) throw FormatError("points csv: too few columns");
        data::LabeledPoint p;
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) p.x.push_back(std::stod(fields[i]));
        p.label = std::stoi(fields.back());
        points.push_back(std::move(p));
    }
    return points;
}

void write_metrics_csv(const std::string& path, const std::vector<apps::StepRow>& rows,
                       std::uint64_t hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot write " + path);
    out << "# config_hash=" << hash_hex(hash) << "\n";
    out << "step,d_loss,g_loss,ac_loss,mean_dg_real,mean_dg_fake\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.step,
                      row.metrics.d_loss, row.metrics.g_loss, row.metrics.ac_loss,
                      row.metrics.mean_dg_real, row.metrics.mean_dg_fake);
        out << buf;
    }
}

nlohmann::ordered_json report_json(const eval::FittingCapacityReport& report,
                                   std::uint64_t hash) {
    nlohmann::ordered_json j;
    j["config_hash"] = hash_hex(hash);
    j["accuracy"] = report.accuracy;
    j["per_class_accuracy"] = report.per_class_accuracy;
    j["per_class_counts"] = report.per_class_counts;
    j["per_epoch_accuracy"] = report.per_epoch_accuracy;
    j["classifier_epochs"] = report.classifier_epochs;
    j["samples_per_epoch"] = report.samples_per_epoch;
    j["seed"] = report.seed;
    j["scale_factor"] = report.scale_factor;
    j["degenerate_generator"] = report.degenerate_generator;
    j["chance_level_warning"] = report.chance_level_warning;
    return j;
}

// One-sided sign test: P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
double sign_test_p(std::size_t wins, std::size_t losses) {
    const std::size_t n = wins + losses;
    if (n == 0) return 1.0;
    double p = 0.0;
    for (std::size_t k = wins; k <= n; ++k) {
        double log_c = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            log_c += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
        p += std::exp(log_c - static_cast<double>(n) * std::log(2.0));
    }
    return std::min(1.0, p);
}

}  // namespace

// --- train ---------------------------------------------------------------------

int cmd_train(const ExperimentConfig& cfg) {
    const auto started = Clock::now();
    const std::uint64_t hash = config_hash(cfg);
    const std::string out_dir = resolve_out_dir(cfg.out_dir);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.command = "train";
    manifest.config_hash = hash;
    manifest.seeds = {cfg.seed};

    Rng rng(cfg.seed);
    Dataset ds = build_dataset(cfg, rng);
    cgan::CGanModel model = cgan::make_model(model_config_for(cfg, ds), rng);

    apps::ScheduleResult result =
        apps::run_schedule(model, ds.train, {}, cfg.train, cfg.trend_interval,
                           cfg.trend_probe_n, rng);

    write_text_file(out_dir + "/config.txt", serialize_config(cfg));
    manifest.add_artifact("config.txt");
    write_metrics_csv(out_dir + "/metrics.csv", result.metrics, hash);
    manifest.add_artifact("metrics.csv");
    {
        std::ofstream out(out_dir + "/trend.csv", std::ios::binary);
        eval::write_trend_csv(out, result.trend, hash);
        manifest.add_artifact("trend.csv");
    }
    write_points_csv(out_dir + "/dataset.csv", ds.train,
                     ds.standardized ? &ds.standardizer : nullptr, hash);
    manifest.add_artifact("dataset.csv");
    cgan::save_model_file(out_dir + "/model.ckpt", model, hash);
    manifest.add_artifact("model.ckpt");

    manifest.add_duration("total", ms_since(started));
    write_manifest(out_dir, manifest);
    std::cout << "train: " << result.metrics.size() << " steps, artifacts in " << out_dir
              << "\n";
    return kExitOk;
}

// --- sample ---------------------------------------------------------------------

namespace {

std::string p_suffix(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    std::string s(buf);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

void write_samples_csv(const std::string& path, const Tensor2D& x,
                       const std::vector<int>& classes, std::uint64_t hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot write " + path);
    out << "# config_hash=" << hash_hex(hash) << "\n";
    for (std::size_t j = 1; j <= x.cols; ++j) out << "x" << j << ",";
    out << "class\n";
    char buf[64];
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (double v : x.row(i)) {
            std::snprintf(buf, sizeof(buf), "%.17g,", v);
            out << buf;
        }
        out << classes[i] << "\n";
    }
}

}  // namespace

int cmd_sample(const ExperimentConfig& cfg, const SampleOptions& opts) {
    const auto started = Clock::now();
    const std::uint64_t hash = config_hash(cfg);
    const std::string out_dir = resolve_out_dir(cfg.out_dir);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.command = "sample";
    manifest.config_hash = hash;
    manifest.seeds = {cfg.seed};

    Rng rng(cfg.seed);

    if (!opts.scores_csv.empty()) {
        // Filter-only mode: apply the acceptance shift to an imported dump.
        std::ifstream in(opts.scores_csv);
        if (!in) throw ConfigError("cannot open score dump: " + opts.scores_csv);
        const std::vector<gold::ScoreRow> rows = gold::read_scores_csv(in);
        const std::vector<std::size_t> kept = apps::rejection_filter(rows, cfg.reject.p, rng);
        std::ofstream out(out_dir + "/accepted_ids.csv", std::ios::binary);
        out << "# config_hash=" << hash_hex(hash) << "\n";
        out << "sample_id\n";
        for (std::size_t i : kept) out << rows[i].sample_id << "\n";
        manifest.add_artifact("accepted_ids.csv");
        manifest.add_duration("total", ms_since(started));
        write_manifest(out_dir, manifest);
        std::cout << "sample: kept " << kept.size() << " of " << rows.size() << " rows\n";
        return kExitOk;
    }

    cgan::LoadedModel loaded = cgan::load_model_file(opts.checkpoint);
    const cgan::CGanModel& model = loaded.model;
    std::vector<int> all_classes(static_cast<std::size_t>(model.cfg.class_count));
    for (std::size_t c = 0; c < all_classes.size(); ++c) all_classes[c] = static_cast<int>(c);

    std::vector<double> sweep = opts.reject && !cfg.p_sweep.empty()
                                    ? cfg.p_sweep
                                    : std::vector<double>{cfg.reject.p};
    for (double p : sweep) {
        const bool sweeping = sweep.size() > 1;
        const std::string tag = sweeping ? "_p" + p_suffix(p) : "";
        Tensor2D x;
        std::vector<int> classes;
        std::vector<gold::ScoreRow> score_rows;
        if (opts.reject) {
            apps::RejectionConfig rc = cfg.reject;
            rc.p = p;
            rc.target_accept_count = cfg.sample_count;
            apps::RejectionResult res = apps::rejection_sample(model, all_classes, rc, rng);
            x = std::move(res.samples);
            classes = std::move(res.classes);
            score_rows = std::move(res.accepted_rows);
            std::cout << "sample: p=" << p << " accepted " << classes.size() << " of "
                      << res.candidates_seen << " candidates (mean d_bal "
                      << res.mean_dbal_accepted << " vs " << res.mean_dbal_candidates
                      << ")\n";
        } else {
            const Tensor2D z = cgan::sample_latent(cfg.sample_count, model.cfg.latent_dim, rng);
            classes = cgan::sample_classes(cfg.sample_count, model.cfg.class_count, rng);
            x = cgan::generate(model, z, classes);
            const cgan::DiscOut disc = cgan::discriminate(model, x);
            score_rows.resize(x.rows);
            for (std::size_t i = 0; i < x.rows; ++i) {
                gold::ScoreRow row;
                row.sample_id = static_cast<std::uint32_t>(i);
                row.d_g = disc.d_g[i];
                row.d_c_or_entropy = disc.d_c.at(i, static_cast<std::size_t>(classes[i]));
                row.score = gold::score(row.d_g, row.d_c_or_entropy,
                                        gold::Provenance::Generated, classes[i]);
                score_rows[i] = row;
            }
        }
        const std::string samples_name = "samples" + tag + ".csv";
        write_samples_csv(out_dir + "/" + samples_name, x, classes, hash);
        manifest.add_artifact(samples_name);
        const std::string scores_name = "scores" + tag + ".csv";
        {
            std::ofstream out(out_dir + "/" + scores_name, std::ios::binary);
            gold::write_scores_csv(out, score_rows);
        }
        manifest.add_artifact(scores_name);
        if (opts.emit_svg && x.cols == 2) {
            std::vector<ScatterPoint> pts;
            pts.reserve(x.rows);
            for (std::size_t i = 0; i < x.rows; ++i)
                pts.push_back({x.at(i, 0), x.at(i, 1),
                               palette_color(static_cast<std::size_t>(classes[i])), 2.0});
            const std::string svg_name = "samples" + tag + ".svg";
            write_text_file(out_dir + "/" + svg_name,
                            svg_scatter("generated samples", pts));
            manifest.add_artifact(svg_name);
        }
    }

    manifest.add_duration("total", ms_since(started));
    write_manifest(out_dir, manifest);
    return kExitOk;
}

// --- eval -----------------------------------------------------------------------

int cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint) {
    const auto started = Clock::now();
    const std::uint64_t hash = config_hash(cfg);
    const std::string out_dir = resolve_out_dir(cfg.out_dir);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.command = "eval";
    manifest.config_hash = hash;
    manifest.seeds = {cfg.seed};

    Rng rng(cfg.seed);
    Dataset ds = build_dataset(cfg, rng);
    cgan::LoadedModel loaded = cgan::load_model_file(checkpoint);
    if (loaded.model.cfg.data_dim != ds.dim)
        throw ConfigError("checkpoint data dim " + std::to_string(loaded.model.cfg.data_dim) +
                          " incompatible with dataset dim " + std::to_string(ds.dim));
    if (loaded.model.cfg.class_count != ds.class_count)
        throw ConfigError("checkpoint class count " +
                          std::to_string(loaded.model.cfg.class_count) +
                          " incompatible with dataset classes " +
                          std::to_string(ds.class_count));

    eval::EvalConfig ec = cfg.eval;
    ec.seed = cfg.seed;
    const eval::FittingCapacityReport report =
        eval::fitting_capacity(loaded.model, ds.test, ec);

    std::ofstream out(out_dir + "/report.json", std::ios::binary);
    out << report_json(report, hash).dump(2) << "\n";
    manifest.add_artifact("report.json");
    manifest.add_duration("total", ms_since(started));
    write_manifest(out_dir, manifest);

    std::cout << "eval: fitting capacity " << report.accuracy;
    if (report.chance_level_warning) std::cout << " (warning: at or near chance level)";
    if (report.degenerate_generator) std::cout << " (warning: degenerate generator)";
    std::cout << "\n";
    return kExitOk;
}

// --- active ----------------------------------------------------------------------

namespace {

void render_round_svg(const std::string& path, const apps::RoundRecord& record,
                      const data::SamplePool& pool, const apps::PoolScores& scores,
                      const cgan::CGanModel& model, const data::Standardizer* inverse) {
    std::vector<ScatterPoint> pts;
    // pool colored by score
    double lo = 0.0, hi = 0.0;
    if (!scores.rows.empty()) {
        lo = scores.rows[0].score.combined;
        hi = lo;
        for (const auto& row : scores.rows) {
            lo = std::min(lo, row.score.combined);
            hi = std::max(hi, row.score.combined);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t i = 0; i < scores.rows.size(); ++i) {
        std::vector<double> x = pool.unlabeled()[i].x;
        if (inverse) x = inverse->invert(x);
        pts.push_back({x[0], x[1],
                       heat_color((scores.rows[i].score.combined - lo) / span), 2.0});
    }
    // generated samples (fixed probe seed per round keeps the plot replayable)
    Rng probe(Rng::derive_seed(0x5caff01d, record.round));
    const Tensor2D z = cgan::sample_latent(256, model.cfg.latent_dim, probe);
    const std::vector<int> classes = cgan::sample_classes(256, model.cfg.class_count, probe);
    const Tensor2D gen = cgan::generate(model, z, classes);
    for (std::size_t i = 0; i < gen.rows; ++i) {
        std::vector<double> x = {gen.at(i, 0), gen.at(i, 1)};
        if (inverse) x = inverse->invert(x);
        pts.push_back({x[0], x[1], "#bbbbbb", 1.5});
    }
    // labeled points on top, colored by class
    for (std::size_t i = 0; i < pool.labeled_size(); ++i) {
        std::vector<double> x = pool.labeled()[i].x;
        if (inverse) x = inverse->invert(x);
        pts.push_back({x[0], x[1],
                       palette_color(static_cast<std::size_t>(pool.labeled_labels()[i])), 5.0});
    }
    write_text_file(path, svg_scatter("round " + std::to_string(record.round) +
                                          " (labeled " + std::to_string(record.labeled_size) +
                                          ")",
                                      pts));
}

nlohmann::ordered_json active_state_json(const apps::ActiveState& state, std::uint64_t hash,
                                         const std::string& arm, std::uint64_t trial_seed) {
    nlohmann::ordered_json j;
    j["config_hash"] = hash_hex(hash);
    j["arm"] = arm;
    j["trial_seed"] = trial_seed;
    j["triplet"] = {state.triplet.initial_n, state.triplet.query_n, state.triplet.final_n};
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (const auto& r : state.history) {
        nlohmann::ordered_json rj;
        rj["round"] = r.round;
        rj["labeled_size"] = r.labeled_size;
        rj["selected_ids"] = r.selected;
        rj["fitting_capacity"] = r.fitting_capacity;
        rj["best_val_capacity"] = r.best_val_capacity;
        rj["sigma_g"] = r.sigma_g;
        rj["sigma_c"] = r.sigma_c;
        rounds.push_back(rj);
    }
    j["rounds"] = rounds;
    return j;
}

}  // namespace

int cmd_active(const ExperimentConfig& cfg) {
    const auto started = Clock::now();
    const std::uint64_t hash = config_hash(cfg);
    const std::string out_dir = resolve_out_dir(cfg.out_dir);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.command = "active";
    manifest.config_hash = hash;

    write_text_file(out_dir + "/config.txt", serialize_config(cfg));
    manifest.add_artifact("config.txt");

    std::ofstream curve(out_dir + "/capacity_curve.csv", std::ios::binary);
    curve << "# config_hash=" << hash_hex(hash) << "\n";
    curve << "trial,arm,round,labeled_n,fitting_capacity\n";

    std::vector<double> final_gold, final_random;

    for (std::size_t trial = 0; trial < cfg.active_trials; ++trial) {
        const std::uint64_t trial_seed = Rng::derive_seed(cfg.seed, trial);
        manifest.seeds.push_back(trial_seed);
        for (const bool random_arm : {false, true}) {
            Rng rng(trial_seed);
            Dataset ds = build_dataset(cfg, rng);
            std::vector<data::LabeledPoint> all_points = ds.train;
            all_points.insert(all_points.end(), ds.test.begin(), ds.test.end());
            data::SamplePool pool = data::make_pool(all_points, cfg.active.triplet.initial_n,
                                                    cfg.data.test_n, ds.class_count, rng);
            apps::ActiveConfig ac = cfg.active;
            ac.model = model_config_for(cfg, ds);
            ac.random_acquisition = random_arm;
            ac.seed = trial_seed;

            const std::string arm = random_arm ? "random" : "gold";
            apps::RoundCallback on_round = nullptr;
            if (!random_arm && trial == 0 && cfg.active_render && ds.dim == 2) {
                on_round = [&](const apps::RoundRecord& record, const data::SamplePool& p,
                               const apps::PoolScores& scores, const cgan::CGanModel& model) {
                    if (scores.rows.empty()) return;
                    const std::string name =
                        "queries_round" + std::to_string(record.round) + ".svg";
                    render_round_svg(out_dir + "/" + name, record, p, scores, model,
                                     ds.standardized ? &ds.standardizer : nullptr);
                    manifest.add_artifact(name);
                };
            }

            apps::ActiveState state = apps::active_learning_run(std::move(pool), ac, rng,
                                                                on_round);

            for (const auto& r : state.history) {
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%zu,%s,%zu,%zu,%.17g\n", trial, arm.c_str(),
                              r.round, r.labeled_size, r.fitting_capacity);
                curve << buf;
            }
            const double final_cap = state.history.back().fitting_capacity;
            (random_arm ? final_random : final_gold).push_back(final_cap);

            const std::string state_name =
                "active_trial" + std::to_string(trial) + "_" + arm + ".json";
            std::ofstream sj(out_dir + "/" + state_name, std::ios::binary);
            sj << active_state_json(state, hash, arm, trial_seed).dump(2) << "\n";
            manifest.add_artifact(state_name);

            std::cout << "active: trial " << trial << " arm " << arm << " final capacity "
                      << final_cap << "\n";
        }
    }
    curve.close();
    manifest.add_artifact("capacity_curve.csv");

    double mean_gold = 0.0, mean_random = 0.0;
    std::size_t wins = 0, losses = 0;
    for (std::size_t t = 0; t < final_gold.size(); ++t) {
        mean_gold += final_gold[t];
        mean_random += final_random[t];
        if (final_gold[t] > final_random[t]) ++wins;
        else if (final_gold[t] < final_random[t]) ++losses;
    }
    mean_gold /= static_cast<double>(final_gold.size());
    mean_random /= static_cast<double>(final_random.size());
    const double p_value = sign_test_p(wins, losses);

    nlohmann::ordered_json summary;
    summary["config_hash"] = hash_hex(hash);
    summary["trials"] = cfg.active_trials;
    summary["mean_final_capacity_gold"] = mean_gold;
    summary["mean_final_capacity_random"] = mean_random;
    summary["wins"] = wins;
    summary["losses"] = losses;
    summary["sign_test_p"] = p_value;
    {
        std::ofstream out(out_dir + "/summary.json", std::ios::binary);
        out << summary.dump(2) << "\n";
    }
    manifest.add_artifact("summary.json");

    manifest.add_duration("total", ms_since(started));
    write_manifest(out_dir, manifest);
    std::cout << "active: gold " << mean_gold << " vs random " << mean_random << " (wins "
              << wins << ", losses " << losses << ", sign test p " << p_value << ")\n";
    return kExitOk;
}

// --- plot ------------------------------------------------------------------------

namespace {

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

}  // namespace

int cmd_plot(const std::string& kind, const std::vector<std::string>& inputs,
             const std::string& out_path) {
    if (inputs.empty()) throw ConfigError("plot: need at least one input file");
    if (kind == "trend") {
        std::vector<SvgSeries> series;
        bool empty = true;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            std::ifstream in(inputs[i]);
            if (!in) throw ConfigError("cannot open " + inputs[i]);
            const eval::TrendLog log = eval::read_trend_csv(in);
            SvgSeries s;
            s.label = stem_of(inputs[i]);
            s.color = palette_color(i);
            for (const auto& pt : log.points)
                s.points.emplace_back(static_cast<double>(pt.step), pt.mean_combined);
            if (!s.points.empty()) empty = false;
            series.push_back(std::move(s));
        }
        if (empty) std::cerr << "plot: warning: no trend points, emitting empty axes\n";
        write_text_file(out_path,
                        svg_line_chart("mean gap-of-log-densities on generated samples",
                                       "step", "mean estimate", series));
        return kExitOk;
    }
    if (kind == "histogram") {
        std::ifstream in(inputs[0]);
        if (!in) throw ConfigError("cannot open " + inputs[0]);
        const eval::HistogramTable table = eval::read_histogram_csv(in);
        write_text_file(out_path, svg_histogram("estimator term histogram", table));
        return kExitOk;
    }
    if (kind == "capacity-curve") {
        // capacity_curve.csv: trial,arm,round,labeled_n,fitting_capacity
        std::map<std::string, std::map<std::size_t, std::pair<double, std::size_t>>> agg;
        for (const auto& input : inputs) {
            std::ifstream in(input);
            if (!in) throw ConfigError("cannot open " + input);
            std::string line;
            bool header_seen = false;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                if (!header_seen) {
                    header_seen = true;
                    continue;
                }
                std::stringstream ss(line);
                std::string trial, arm, round, labeled, cap;
                std::getline(ss, trial, ',');
                std::getline(ss, arm, ',');
                std::getline(ss, round, ',');
                std::getline(ss, labeled, ',');
                std::getline(ss, cap, ',');
                auto& cell = agg[arm][std::stoul(round)];
                cell.first += std::stod(cap);
                cell.second += 1;
            }
        }
        std::vector<SvgSeries> series;
        std::size_t idx = 0;
        for (const auto& [arm, rounds] : agg) {
            SvgSeries s;
            s.label = arm;
            s.color = palette_color(idx++);
            for (const auto& [round, cell] : rounds)
                s.points.emplace_back(static_cast<double>(round),
                                      cell.first / static_cast<double>(cell.second));
            series.push_back(std::move(s));
        }
        write_text_file(out_path, svg_line_chart("fitting capacity by acquisition round",
                                                 "round", "mean fitting capacity", series));
        return kExitOk;
    }
    if (kind == "scatter") {
        const std::vector<data::LabeledPoint> points = read_points_csv(inputs[0]);
        std::vector<ScatterPoint> pts;
        pts.reserve(points.size());
        for (const auto& p : points)
            pts.push_back({p.x[0], p.x.size() > 1 ? p.x[1] : 0.0,
                           palette_color(static_cast<std::size_t>(p.label)), 2.0});
        write_text_file(out_path, svg_scatter(stem_of(inputs[0]), pts));
        return kExitOk;
    }
    throw ConfigError("plot: unknown kind '" + kind +
                      "' (want trend|histogram|capacity-curve|scatter)");
}

// --- argv entry -------------------------------------------------------------------

int run_cli(int argc, char** argv) {
    CLI::App app{"goldlab: conditional-GAN diagnostics via the gap of log-densities"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "config file (key = value lines)");
    app.add_option("--set", overrides, "config override, key=value (repeatable)");

    auto* train = app.add_subcommand("train", "train a model (baseline + optional re-weighting)");
    train->fallthrough();
    auto* sample = app.add_subcommand("sample", "draw samples from a checkpoint");
    sample->fallthrough();
    SampleOptions sopts;
    sample->add_option("--checkpoint", sopts.checkpoint, "model checkpoint");
    sample->add_flag("--reject", sopts.reject,
                     "apply rejection sampling (acceptance is batch-relative: M is the max of "
                     "exp(d_bal) within each candidate batch)");
    sample->add_flag("--svg", sopts.emit_svg, "emit a scatter SVG next to the CSV");
    sample->add_option("--scores", sopts.scores_csv,
                       "filter an existing score dump instead of sampling a model");
    auto* active = app.add_subcommand("active", "paired active-learning experiment");
    active->fallthrough();
    auto* eval_cmd = app.add_subcommand("eval", "fitting capacity of a checkpoint");
    eval_cmd->fallthrough();
    std::string eval_checkpoint;
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();
    auto* plot = app.add_subcommand("plot", "render CSV artifacts to SVG");
    plot->fallthrough();
    std::string plot_kind, plot_out;
    std::vector<std::string> plot_inputs;
    plot->add_option("--kind", plot_kind, "trend|histogram|capacity-curve|scatter")->required();
    plot->add_option("--in", plot_inputs, "input CSV file(s)")->required();
    plot->add_option("--out", plot_out, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        ExperimentConfig cfg = config_path.empty() ? parse_config("", overrides)
                                                   : load_config_file(config_path, overrides);
        if (train->parsed()) return cmd_train(cfg);
        if (sample->parsed()) {
            if (sopts.checkpoint.empty() && sopts.scores_csv.empty())
                throw ConfigError("sample: need --checkpoint or --scores");
            return cmd_sample(cfg, sopts);
        }
        if (active->parsed()) return cmd_active(cfg);
        if (eval_cmd->parsed()) return cmd_eval(cfg, eval_checkpoint);
        if (plot->parsed()) return cmd_plot(plot_kind, plot_inputs, plot_out);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StarvationError& e) {
        std::cerr << "starvation: " << e.what() << "\n";
        return kExitStarved;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace goldlab::cli
