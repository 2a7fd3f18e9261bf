#include "goldlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "goldlab/errors.hpp"

namespace goldlab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_doubles(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string token;
    std::stringstream ss(value);
    while (ss >> token) {
        // allow comma-separated lists too
        std::stringstream ts(token);
        std::string piece;
        while (std::getline(ts, piece, ',')) {
            if (piece.empty()) continue;
            try {
                std::size_t used = 0;
                out.push_back(std::stod(piece, &used));
                if (used != piece.size()) throw std::invalid_argument(piece);
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': bad number '" + piece + "'");
            }
        }
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    const auto vals = parse_doubles(key, value);
    if (vals.size() != 1) throw ConfigError("config key '" + key + "': expected one number");
    return vals[0];
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ConfigError("config key '" + key + "': expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected true/false");
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    for (double v : parse_doubles(key, value)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw ConfigError("config key '" + key + "': expected non-negative integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

struct MixtureDraft {
    std::optional<std::array<double, 2>> mean;
    std::optional<std::array<double, 4>> cov;
    std::optional<double> weight;
    std::optional<int> label;
};

void apply_key(ExperimentConfig& cfg, std::map<int, MixtureDraft>& mixture_draft,
               const std::string& key, const std::string& value) {
    // data
    if (key == "data.kind") {
        if (value != "synthetic" && value != "idx")
            throw ConfigError("config key 'data.kind': expected synthetic|idx, got '" + value +
                              "'");
        cfg.data.kind = value;
    } else if (key == "data.train_n") cfg.data.train_n = parse_size(key, value);
    else if (key == "data.test_n") cfg.data.test_n = parse_size(key, value);
    else if (key == "data.standardize") cfg.data.standardize = parse_bool(key, value);
    else if (key == "data.images") cfg.data.images = value;
    else if (key == "data.labels") cfg.data.labels = value;
    else if (key == "data.test_images") cfg.data.test_images = value;
    else if (key == "data.test_labels") cfg.data.test_labels = value;
    else if (key == "data.train_limit") cfg.data.train_limit = parse_size(key, value);
    else if (key == "data.test_limit") cfg.data.test_limit = parse_size(key, value);
    // mixture components
    else if (key.rfind("mixture.", 0) == 0) {
        const std::string rest = key.substr(8);
        const auto dot = rest.find('.');
        if (dot == std::string::npos)
            throw ConfigError("config key '" + key + "': want mixture.<i>.<field>");
        int idx = 0;
        try {
            idx = std::stoi(rest.substr(0, dot));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad component index");
        }
        const std::string field = rest.substr(dot + 1);
        MixtureDraft& draft = mixture_draft[idx];
        if (field == "mean") {
            const auto vals = parse_doubles(key, value);
            if (vals.size() != 2) throw ConfigError("config key '" + key + "': want 2 numbers");
            draft.mean = {vals[0], vals[1]};
        } else if (field == "cov") {
            const auto vals = parse_doubles(key, value);
            if (vals.size() != 4) throw ConfigError("config key '" + key + "': want 4 numbers");
            draft.cov = {vals[0], vals[1], vals[2], vals[3]};
        } else if (field == "weight") draft.weight = parse_double(key, value);
        else if (field == "class") draft.label = static_cast<int>(parse_size(key, value));
        else throw ConfigError("config key '" + key + "': unknown mixture field");
    }
    // model
    else if (key == "model.data_dim") cfg.model.data_dim = parse_size(key, value);
    else if (key == "model.latent_dim") cfg.model.latent_dim = parse_size(key, value);
    else if (key == "model.class_count")
        cfg.model.class_count = static_cast<int>(parse_size(key, value));
    else if (key == "model.gen_hidden") cfg.model.gen_hidden = parse_sizes(key, value);
    else if (key == "model.disc_hidden") cfg.model.disc_hidden = parse_sizes(key, value);
    else if (key == "model.lr_g") cfg.model.lr_g = parse_double(key, value);
    else if (key == "model.lr_d") cfg.model.lr_d = parse_double(key, value);
    else if (key == "model.class_gain") cfg.model.class_gain = parse_double(key, value);
    // train
    else if (key == "train.lambda_c") cfg.train.lambda_c = parse_double(key, value);
    else if (key == "train.batch_size") cfg.train.batch_size = parse_size(key, value);
    else if (key == "train.baseline_steps") cfg.train.baseline_steps = parse_size(key, value);
    else if (key == "train.reweight_steps") cfg.train.reweight_steps = parse_size(key, value);
    else if (key == "train.beta_d") cfg.train.beta_d = parse_double(key, value);
    else if (key == "train.beta_g") cfg.train.beta_g = parse_double(key, value);
    else if (key == "train.literal_beta0") cfg.train.literal_beta0 = parse_bool(key, value);
    else if (key == "train.instance_noise") cfg.train.instance_noise = parse_double(key, value);
    else if (key == "trend.interval") cfg.trend_interval = parse_size(key, value);
    else if (key == "trend.probe_n") cfg.trend_probe_n = parse_size(key, value);
    // rejection
    else if (key == "reject.p") cfg.reject.p = parse_double(key, value);
    else if (key == "reject.batch_size") cfg.reject.batch_size = parse_size(key, value);
    else if (key == "reject.p_sweep") cfg.p_sweep = parse_doubles(key, value);
    else if (key == "sample.count") cfg.sample_count = parse_size(key, value);
    // active learning
    else if (key == "active.triplet") {
        const auto vals = parse_sizes(key, value);
        if (vals.size() != 3)
            throw ConfigError("config key 'active.triplet': want 3 integers");
        cfg.active.triplet = {vals[0], vals[1], vals[2]};
    } else if (key == "active.epochs") cfg.active.epochs_per_round = parse_size(key, value);
    else if (key == "active.batch_size") cfg.active.batch_size = parse_size(key, value);
    else if (key == "active.lambda_c") cfg.active.lambda_c = parse_double(key, value);
    else if (key == "active.balanced") cfg.active.balanced = parse_bool(key, value);
    else if (key == "active.val_n") cfg.active.val_n = parse_size(key, value);
    else if (key == "active.eval_interval")
        cfg.active.eval_interval_epochs = parse_size(key, value);
    else if (key == "active.trials") cfg.active_trials = parse_size(key, value);
    else if (key == "active.render") cfg.active_render = parse_bool(key, value);
    else if (key == "active.selection_epochs")
        cfg.active.selection_eval.epochs = parse_size(key, value);
    else if (key == "active.selection_samples")
        cfg.active.selection_eval.samples_per_epoch = parse_size(key, value);
    // eval
    else if (key == "eval.epochs") cfg.eval.epochs = parse_size(key, value);
    else if (key == "eval.samples_per_epoch")
        cfg.eval.samples_per_epoch = parse_size(key, value);
    else if (key == "eval.batch_size") cfg.eval.batch_size = parse_size(key, value);
    else if (key == "eval.hidden") cfg.eval.hidden = parse_size(key, value);
    else if (key == "eval.lr") cfg.eval.lr = parse_double(key, value);
    // run
    else if (key == "seed") cfg.seed = parse_size(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

void validate(ExperimentConfig& cfg) {
    if (cfg.train.lambda_c < 0) throw ConfigError("train.lambda_c must be >= 0");
    if (cfg.train.batch_size == 0) throw ConfigError("train.batch_size must be positive");
    if (cfg.reject.p < 0.0 || cfg.reject.p >= 1.0)
        throw ConfigError("reject.p must lie in [0, 1)");
    for (double p : cfg.p_sweep)
        if (p < 0.0 || p >= 1.0) throw ConfigError("reject.p_sweep entries must lie in [0, 1)");
    if (cfg.model.class_count < 2) throw ConfigError("model.class_count must be >= 2");
    cfg.active.triplet.rounds();  // throws when inconsistent
    cfg.train.seed = cfg.seed;
    cfg.active.seed = cfg.seed;
    cfg.active.model = cfg.model;
    cfg.eval.seed = cfg.seed;
    if (cfg.data.kind == "synthetic") cfg.model.data_dim = 2;
}

}  // namespace

data::SyntheticMixture mixture_from_config(const DataConfig& cfg) {
    if (cfg.mixture.empty()) return data::default_mixture();
    return data::SyntheticMixture(cfg.mixture);
}

ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides) {
    ExperimentConfig cfg;
    std::map<int, MixtureDraft> drafts;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        apply_key(cfg, drafts, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "': expected key=value");
        apply_key(cfg, drafts, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    if (!drafts.empty()) {
        cfg.data.mixture.clear();
        int expected = 0;
        for (const auto& [idx, draft] : drafts) {
            if (idx != expected++)
                throw ConfigError("mixture components must be numbered 0..n-1 without gaps");
            if (!draft.mean || !draft.cov || !draft.weight || !draft.label)
                throw ConfigError("mixture component " + std::to_string(idx) +
                                  ": need mean, cov, weight and class");
            data::MixtureComponent c;
            c.mean = *draft.mean;
            c.cov = *draft.cov;
            c.weight = *draft.weight;
            c.label = *draft.label;
            cfg.data.mixture.push_back(c);
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path,
                                  const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_sizes(const std::vector<std::size_t>& vals) {
    std::string out;
    for (std::size_t v : vals) {
        if (!out.empty()) out += ' ';
        out += std::to_string(v);
    }
    return out;
}

std::string fmt_doubles(const std::vector<double>& vals) {
    std::string out;
    for (double v : vals) {
        if (!out.empty()) out += ' ';
        out += fmt_double(v);
    }
    return out;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "# goldlab experiment config\n";
    out << "data.kind = " << cfg.data.kind << "\n";
    out << "data.train_n = " << cfg.data.train_n << "\n";
    out << "data.test_n = " << cfg.data.test_n << "\n";
    out << "data.standardize = " << (cfg.data.standardize ? "true" : "false") << "\n";
    if (cfg.data.kind == "idx") {
        out << "data.images = " << cfg.data.images << "\n";
        out << "data.labels = " << cfg.data.labels << "\n";
        out << "data.test_images = " << cfg.data.test_images << "\n";
        out << "data.test_labels = " << cfg.data.test_labels << "\n";
        out << "data.train_limit = " << cfg.data.train_limit << "\n";
        out << "data.test_limit = " << cfg.data.test_limit << "\n";
    }
    const auto mixture =
        cfg.data.mixture.empty() && cfg.data.kind == "synthetic"
            ? data::default_mixture().components()
            : cfg.data.mixture;
    for (std::size_t i = 0; i < mixture.size(); ++i) {
        const auto& c = mixture[i];
        out << "mixture." << i << ".mean = " << fmt_double(c.mean[0]) << " "
            << fmt_double(c.mean[1]) << "\n";
        out << "mixture." << i << ".cov = " << fmt_double(c.cov[0]) << " "
            << fmt_double(c.cov[1]) << " " << fmt_double(c.cov[2]) << " "
            << fmt_double(c.cov[3]) << "\n";
        out << "mixture." << i << ".weight = " << fmt_double(c.weight) << "\n";
        out << "mixture." << i << ".class = " << c.label << "\n";
    }
    out << "model.data_dim = " << cfg.model.data_dim << "\n";
    out << "model.latent_dim = " << cfg.model.latent_dim << "\n";
    out << "model.class_count = " << cfg.model.class_count << "\n";
    out << "model.gen_hidden = " << fmt_sizes(cfg.model.gen_hidden) << "\n";
    out << "model.disc_hidden = " << fmt_sizes(cfg.model.disc_hidden) << "\n";
    out << "model.lr_g = " << fmt_double(cfg.model.lr_g) << "\n";
    out << "model.lr_d = " << fmt_double(cfg.model.lr_d) << "\n";
    out << "model.class_gain = " << fmt_double(cfg.model.class_gain) << "\n";
    out << "train.lambda_c = " << fmt_double(cfg.train.lambda_c) << "\n";
    out << "train.batch_size = " << cfg.train.batch_size << "\n";
    out << "train.baseline_steps = " << cfg.train.baseline_steps << "\n";
    out << "train.reweight_steps = " << cfg.train.reweight_steps << "\n";
    out << "train.beta_d = " << fmt_double(cfg.train.beta_d) << "\n";
    out << "train.beta_g = " << fmt_double(cfg.train.beta_g) << "\n";
    out << "train.literal_beta0 = " << (cfg.train.literal_beta0 ? "true" : "false") << "\n";
    out << "train.instance_noise = " << fmt_double(cfg.train.instance_noise) << "\n";
    out << "trend.interval = " << cfg.trend_interval << "\n";
    out << "trend.probe_n = " << cfg.trend_probe_n << "\n";
    out << "reject.p = " << fmt_double(cfg.reject.p) << "\n";
    out << "reject.batch_size = " << cfg.reject.batch_size << "\n";
    if (!cfg.p_sweep.empty()) out << "reject.p_sweep = " << fmt_doubles(cfg.p_sweep) << "\n";
    out << "sample.count = " << cfg.sample_count << "\n";
    out << "active.triplet = " << cfg.active.triplet.initial_n << " "
        << cfg.active.triplet.query_n << " " << cfg.active.triplet.final_n << "\n";
    out << "active.epochs = " << cfg.active.epochs_per_round << "\n";
    out << "active.batch_size = " << cfg.active.batch_size << "\n";
    out << "active.lambda_c = " << fmt_double(cfg.active.lambda_c) << "\n";
    out << "active.balanced = " << (cfg.active.balanced ? "true" : "false") << "\n";
    out << "active.val_n = " << cfg.active.val_n << "\n";
    out << "active.eval_interval = " << cfg.active.eval_interval_epochs << "\n";
    out << "active.trials = " << cfg.active_trials << "\n";
    out << "active.render = " << (cfg.active_render ? "true" : "false") << "\n";
    out << "active.selection_epochs = " << cfg.active.selection_eval.epochs << "\n";
    out << "active.selection_samples = " << cfg.active.selection_eval.samples_per_epoch << "\n";
    out << "eval.epochs = " << cfg.eval.epochs << "\n";
    out << "eval.samples_per_epoch = " << cfg.eval.samples_per_epoch << "\n";
    out << "eval.batch_size = " << cfg.eval.batch_size << "\n";
    out << "eval.hidden = " << cfg.eval.hidden << "\n";
    out << "eval.lr = " << fmt_double(cfg.eval.lr) << "\n";
    out << "seed = " << cfg.seed << "\n";
    // out_dir is a runtime destination, not experiment identity: leaving it
    // out keeps the config hash stable across replay directories.
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string resolve_out_dir(const std::string& out_dir) {
    if (!out_dir.empty() && out_dir[0] == '/') return out_dir;
    const char* root = std::getenv("GOLDLAB_OUT_ROOT");
    if (!root || !*root) return out_dir;
    std::string prefix(root);
    if (prefix.back() != '/') prefix += '/';
    return prefix + out_dir;
}

}  // namespace goldlab::cli
