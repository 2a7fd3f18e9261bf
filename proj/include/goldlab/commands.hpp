#pragma once

#include <string>
#include <vector>

#include "goldlab/config.hpp"

namespace goldlab::cli {

// Exit codes: 0 success, 1 config error, 2 runtime error, 3 starvation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitStarved = 3;

struct SampleOptions {
    std::string checkpoint;
    bool reject = false;
    bool emit_svg = false;
    std::string scores_csv;  // filter-only mode: import a score dump instead of a model
};

int cmd_train(const ExperimentConfig& cfg);
int cmd_sample(const ExperimentConfig& cfg, const SampleOptions& opts);
int cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint);
int cmd_active(const ExperimentConfig& cfg);
int cmd_plot(const std::string& kind, const std::vector<std::string>& inputs,
             const std::string& out_path);

// Full argv entry point (CLI11 wiring plus error-to-exit-code mapping).
int run_cli(int argc, char** argv);

}  // namespace goldlab::cli
