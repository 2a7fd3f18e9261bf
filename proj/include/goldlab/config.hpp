#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "goldlab/apps.hpp"
#include "goldlab/cgan.hpp"
#include "goldlab/eval.hpp"
#include "goldlab/mixture.hpp"

namespace goldlab::cli {

struct DataConfig {
    std::string kind = "synthetic";  // synthetic | idx
    std::size_t train_n = 2000;      // synthetic draw sizes
    std::size_t test_n = 600;
    bool standardize = true;
    std::string images;  // idx paths
    std::string labels;
    std::string test_images;
    std::string test_labels;
    std::size_t train_limit = 5000;  // desk-scale idx subsets
    std::size_t test_limit = 1000;
    std::vector<data::MixtureComponent> mixture;  // empty = default 6-cluster layout
};

// Everything a run needs, parsed from a plain key-value config file
// ("section.key = value", '#' comments) with CLI flag overrides; a canonical
// serialization of this record is hashed into every artifact.
struct ExperimentConfig {
    DataConfig data;
    cgan::ModelConfig model;
    cgan::TrainConfig train;
    std::size_t trend_interval = 50;
    std::size_t trend_probe_n = 256;
    apps::RejectionConfig reject;
    std::vector<double> p_sweep;
    std::size_t sample_count = 5000;
    apps::ActiveConfig active;
    std::size_t active_trials = 25;
    bool active_render = true;  // per-round scatter SVGs for trial 0
    eval::EvalConfig eval;
    std::uint64_t seed = 0;
    std::string out_dir = "run";
};

// Parse config text; unknown or malformed keys raise ConfigError naming the
// key. `overrides` are "section.key=value" strings from the command line.
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config_file(const std::string& path,
                                  const std::vector<std::string>& overrides = {});

// Canonical text form (fixed key order, mixture always explicit).
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// The mixture described by the config (or the default layout).
data::SyntheticMixture mixture_from_config(const DataConfig& cfg);

// Output directory resolution: relative out_dir goes under $GOLDLAB_OUT_ROOT
// when that is set.
std::string resolve_out_dir(const std::string& out_dir);

}  // namespace goldlab::cli
