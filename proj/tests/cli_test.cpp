#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "goldlab/commands.hpp"
#include "goldlab/config.hpp"
#include "goldlab/errors.hpp"
#include "goldlab/manifest.hpp"
#include "goldlab/svg.hpp"

using namespace goldlab;
using namespace goldlab::cli;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    const std::string dir = (fs::temp_directory_path() / ("goldlab_cli_" + name)).string();
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "goldlab");
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config parsing, overrides and field-level errors") {
    const std::string text =
        "# comment\n"
        "data.kind = synthetic\n"
        "data.train_n = 500\n"
        "train.lambda_c = 0.25\n"
        "train.baseline_steps = 100\n"
        "active.triplet = 10 2 18\n"
        "seed = 42\n";
    const ExperimentConfig cfg = parse_config(text, {"train.lambda_c=0.5"});
    CHECK(cfg.data.train_n == 500);
    CHECK(cfg.train.lambda_c == 0.5);  // override wins
    CHECK(cfg.train.baseline_steps == 100);
    CHECK(cfg.active.triplet.initial_n == 10);
    CHECK(cfg.seed == 42);
    CHECK(cfg.train.seed == 42);

    CHECK_THROWS_WITH_AS(parse_config("bogus.key = 1\n"), "unknown config key 'bogus.key'",
                         ConfigError);
    CHECK_THROWS_AS(parse_config("train.lambda_c = banana\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("train.lambda_c = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("reject.p = 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("active.triplet = 4 3 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("data.kind = parquet\n"), ConfigError);
}

TEST_CASE("config serialization is canonical and hash-stable") {
    const ExperimentConfig a = parse_config("seed = 7\n");
    const ExperimentConfig b = parse_config("# different text, same values\nseed = 7\n");
    CHECK(serialize_config(a) == serialize_config(b));
    CHECK(config_hash(a) == config_hash(b));
    const ExperimentConfig c = parse_config("seed = 8\n");
    CHECK(config_hash(a) != config_hash(c));

    // out_dir is runtime destination, not identity
    ExperimentConfig d = a;
    d.out_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(d));

    // parse(serialize(x)) is a fixed point
    const ExperimentConfig reparsed = parse_config(serialize_config(a));
    CHECK(serialize_config(reparsed) == serialize_config(a));
}

TEST_CASE("mixture components come through the config") {
    const std::string text =
        "mixture.0.mean = 1 2\n"
        "mixture.0.cov = 0.5 0 0 0.5\n"
        "mixture.0.weight = 0.5\n"
        "mixture.0.class = 0\n"
        "mixture.1.mean = -1 -2\n"
        "mixture.1.cov = 0.5 0 0 0.5\n"
        "mixture.1.weight = 0.5\n"
        "mixture.1.class = 1\n";
    const ExperimentConfig cfg = parse_config(text);
    REQUIRE(cfg.data.mixture.size() == 2);
    const auto mix = mixture_from_config(cfg.data);
    CHECK(mix.components()[0].mean[0] == 1.0);
    CHECK(mix.class_count() == 2);

    CHECK_THROWS_AS(parse_config("mixture.0.mean = 1 2\n"), ConfigError);  // incomplete
    CHECK_THROWS_AS(parse_config("mixture.1.mean = 1 2\n"
                                 "mixture.1.cov = 1 0 0 1\n"
                                 "mixture.1.weight = 1\n"
                                 "mixture.1.class = 0\n"),
                    ConfigError);  // gap in numbering
}

TEST_CASE("out dir resolution honors GOLDLAB_OUT_ROOT") {
    ::setenv("GOLDLAB_OUT_ROOT", "/tmp/goldlab_root", 1);
    CHECK(resolve_out_dir("exp1") == "/tmp/goldlab_root/exp1");
    CHECK(resolve_out_dir("/abs/path") == "/abs/path");
    ::unsetenv("GOLDLAB_OUT_ROOT");
    CHECK(resolve_out_dir("exp1") == "exp1");
}

TEST_CASE("manifest round trip") {
    const std::string dir = fresh_dir("manifest");
    RunManifest m;
    m.command = "train";
    m.config_hash = 0x1234abcdULL;
    m.seeds = {1, 2, 3};
    m.add_artifact("metrics.csv");
    m.add_artifact("model.ckpt");
    m.add_duration("total", 123.5);
    write_manifest(dir, m);
    const RunManifest parsed = read_manifest(dir + "/manifest.json");
    CHECK(parsed.command == "train");
    CHECK(parsed.config_hash == 0x1234abcdULL);
    CHECK(parsed.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(parsed.artifacts == std::vector<std::string>{"metrics.csv", "model.ckpt"});
}

TEST_CASE("svg output is byte-deterministic") {
    std::vector<SvgSeries> series(1);
    series[0].label = "run";
    series[0].color = palette_color(0);
    for (int i = 0; i < 20; ++i)
        series[0].points.emplace_back(i, std::sin(0.3 * i));
    const std::string a = svg_line_chart("t", "x", "y", series);
    const std::string b = svg_line_chart("t", "x", "y", series);
    CHECK(a == b);
    CHECK(a.find("<svg") == 0);
    CHECK(a.find("</svg>") != std::string::npos);

    std::vector<ScatterPoint> pts = {{0.0, 0.0, "#ff0000", 2.0}, {1.5, -2.0, "#00ff00", 3.0}};
    CHECK(svg_scatter("s", pts) == svg_scatter("s", pts));
}

TEST_CASE("heat colors are valid and span blue to red") {
    const std::string cold = heat_color(0.0);
    const std::string hot = heat_color(1.0);
    CHECK(cold.size() == 7);
    CHECK(cold[0] == '#');
    CHECK(cold != hot);
}

// --- end-to-end command flows ---------------------------------------------------

namespace {

ExperimentConfig tiny_config(const std::string& out_dir) {
    ExperimentConfig cfg = parse_config(
        "data.train_n = 200\n"
        "data.test_n = 120\n"
        "train.baseline_steps = 60\n"
        "train.reweight_steps = 20\n"
        "train.batch_size = 16\n"
        "trend.interval = 20\n"
        "trend.probe_n = 64\n"
        "model.gen_hidden = 16 16\n"
        "model.disc_hidden = 16 16\n"
        "eval.epochs = 4\n"
        "eval.samples_per_epoch = 256\n"
        "sample.count = 100\n"
        "reject.batch_size = 64\n"
        "seed = 3\n");
    cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

TEST_CASE("train -> sample -> eval -> plot pipeline produces the promised artifacts") {
    const std::string train_dir = fresh_dir("train");
    ExperimentConfig cfg = tiny_config(train_dir);
    CHECK(cmd_train(cfg) == kExitOk);
    for (const char* name :
         {"config.txt", "metrics.csv", "trend.csv", "dataset.csv", "model.ckpt",
          "manifest.json"})
        CHECK(fs::exists(train_dir + "/" + std::string(name)));

    // metrics csv: one row per step plus hash header
    {
        const std::string metrics = slurp(train_dir + "/metrics.csv");
        CHECK(metrics.find("step,d_loss,g_loss,ac_loss,mean_dg_real,mean_dg_fake") !=
              std::string::npos);
        const std::size_t rows = std::count(metrics.begin(), metrics.end(), '\n');
        CHECK(rows == 80 + 2);  // header comment + column header + steps
    }

    // manifest lists every artifact
    {
        const RunManifest manifest = read_manifest(train_dir + "/manifest.json");
        for (const char* name :
             {"config.txt", "metrics.csv", "trend.csv", "dataset.csv", "model.ckpt"})
            CHECK(std::find(manifest.artifacts.begin(), manifest.artifacts.end(),
                            std::string(name)) != manifest.artifacts.end());
    }

    // plain sampling emits exactly the requested row count
    const std::string sample_dir = fresh_dir("sample");
    cfg.out_dir = sample_dir;
    SampleOptions sopts;
    sopts.checkpoint = train_dir + "/model.ckpt";
    sopts.emit_svg = true;
    CHECK(cmd_sample(cfg, sopts) == kExitOk);
    {
        const std::string samples = slurp(sample_dir + "/samples.csv");
        const std::size_t rows = std::count(samples.begin(), samples.end(), '\n');
        CHECK(rows == 100 + 2);
        CHECK(fs::exists(sample_dir + "/samples.svg"));
        CHECK(fs::exists(sample_dir + "/scores.csv"));
    }

    // rejection sampling still returns the exact count
    const std::string reject_dir = fresh_dir("reject");
    cfg.out_dir = reject_dir;
    sopts.reject = true;
    sopts.emit_svg = false;
    CHECK(cmd_sample(cfg, sopts) == kExitOk);
    {
        const std::string samples = slurp(reject_dir + "/samples.csv");
        CHECK(std::count(samples.begin(), samples.end(), '\n') == 100 + 2);
    }

    // p sweep emits one file per p
    const std::string sweep_dir = fresh_dir("sweep");
    cfg.out_dir = sweep_dir;
    cfg.p_sweep = {0.1, 0.3, 0.5, 0.7, 0.9};
    CHECK(cmd_sample(cfg, sopts) == kExitOk);
    for (const char* name : {"samples_p0p1.csv", "samples_p0p3.csv", "samples_p0p5.csv",
                             "samples_p0p7.csv", "samples_p0p9.csv"})
        CHECK(fs::exists(sweep_dir + "/" + std::string(name)));
    cfg.p_sweep.clear();

    // eval writes a report
    const std::string eval_dir = fresh_dir("eval");
    cfg.out_dir = eval_dir;
    CHECK(cmd_eval(cfg, train_dir + "/model.ckpt") == kExitOk);
    {
        const std::string report = slurp(eval_dir + "/report.json");
        CHECK(report.find("\"accuracy\"") != std::string::npos);
        CHECK(report.find("\"per_class_accuracy\"") != std::string::npos);
        CHECK(report.find("\"scale_factor\"") != std::string::npos);
    }

    // identical eval config and checkpoint give identical reports
    const std::string eval_dir2 = fresh_dir("eval2");
    cfg.out_dir = eval_dir2;
    CHECK(cmd_eval(cfg, train_dir + "/model.ckpt") == kExitOk);
    CHECK(slurp(eval_dir + "/report.json") == slurp(eval_dir2 + "/report.json"));

    // plot each kind
    const std::string plot_dir = fresh_dir("plot");
    CHECK(cmd_plot("trend", {train_dir + "/trend.csv"}, plot_dir + "/trend.svg") == kExitOk);
    CHECK(cmd_plot("scatter", {train_dir + "/dataset.csv"}, plot_dir + "/scatter.svg") ==
          kExitOk);
    CHECK(fs::exists(plot_dir + "/trend.svg"));
    CHECK(fs::exists(plot_dir + "/scatter.svg"));

    // byte-identical SVG for identical inputs
    CHECK(cmd_plot("trend", {train_dir + "/trend.csv"}, plot_dir + "/trend2.svg") == kExitOk);
    CHECK(slurp(plot_dir + "/trend.svg") == slurp(plot_dir + "/trend2.svg"));
}

TEST_CASE("filter-only rejection consumes a score dump") {
    const std::string dir = fresh_dir("filter");
    // build a small dump
    const std::string scores_path = dir + "/dump.csv";
    {
        std::vector<gold::ScoreRow> rows(50);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].sample_id = static_cast<std::uint32_t>(i);
            rows[i].score = gold::score(0.3 + 0.01 * static_cast<double>(i % 40), 0.8,
                                        gold::Provenance::Generated, 0);
            rows[i].d_g = 0.5;
            rows[i].d_c_or_entropy = 0.8;
        }
        std::ofstream out(scores_path);
        gold::write_scores_csv(out, rows);
    }
    ExperimentConfig cfg = parse_config("reject.p = 0.5\nseed = 1\n");
    cfg.out_dir = dir + "/out";
    SampleOptions sopts;
    sopts.scores_csv = scores_path;
    CHECK(cmd_sample(cfg, sopts) == kExitOk);
    CHECK(fs::exists(dir + "/out/accepted_ids.csv"));
}

TEST_CASE("empty trend input plots axes-only svg and succeeds") {
    const std::string dir = fresh_dir("emptyplot");
    {
        std::ofstream out(dir + "/empty.csv");
        out << "# config_hash=0\n";
        out << "step,mean_gold,mean_marginal,mean_conditional,sigma_g,sigma_c\n";
    }
    CHECK(cmd_plot("trend", {dir + "/empty.csv"}, dir + "/empty.svg") == kExitOk);
    const std::string svg = slurp(dir + "/empty.svg");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("polyline") == std::string::npos);
}

TEST_CASE("cli maps errors to the documented exit codes") {
    // unknown config key -> 1
    CHECK(run({"train", "--set", "bogus=1"}) == kExitConfig);
    // unknown plot kind -> 1
    const std::string dir = fresh_dir("exitcodes");
    {
        std::ofstream out(dir + "/x.csv");
        out << "step\n";
    }
    CHECK(run({"plot", "--kind", "nope", "--in", dir + "/x.csv", "--out", dir + "/x.svg"}) ==
          kExitConfig);
    // missing checkpoint file -> runtime error 2
    ExperimentConfig cfg = parse_config("");
    cfg.out_dir = dir;
    CHECK(run({"eval", "--checkpoint", dir + "/missing.ckpt", "--set",
               std::string("out_dir=") + dir}) == kExitRuntime);
    // sample without checkpoint or scores -> 1
    CHECK(run({"sample"}) == kExitConfig);
}

TEST_CASE("active command emits paired artifacts and query visualizations") {
    const std::string dir = fresh_dir("active");
    ExperimentConfig cfg = parse_config(
        "data.train_n = 120\n"
        "data.test_n = 60\n"
        "model.gen_hidden = 8\n"
        "model.disc_hidden = 8\n"
        "model.latent_dim = 4\n"
        "active.triplet = 4 1 6\n"
        "active.epochs = 2\n"
        "active.batch_size = 16\n"
        "active.val_n = 20\n"
        "active.eval_interval = 1\n"
        "active.trials = 1\n"
        "active.selection_epochs = 2\n"
        "active.selection_samples = 64\n"
        "eval.epochs = 2\n"
        "eval.samples_per_epoch = 64\n"
        "seed = 9\n");
    cfg.active.selection_eval.batch_size = 32;
    cfg.active.final_eval = cfg.active.selection_eval;
    cfg.out_dir = dir;
    CHECK(cmd_active(cfg) == kExitOk);
    for (const char* name : {"capacity_curve.csv", "summary.json", "active_trial0_gold.json",
                             "active_trial0_random.json", "config.txt", "manifest.json",
                             "queries_round0.svg", "queries_round1.svg"})
        CHECK(fs::exists(dir + "/" + std::string(name)));
    const std::string summary = slurp(dir + "/summary.json");
    CHECK(summary.find("mean_final_capacity_gold") != std::string::npos);
    CHECK(summary.find("sign_test_p") != std::string::npos);
    const std::string state = slurp(dir + "/active_trial0_gold.json");
    CHECK(state.find("\"selected_ids\"") != std::string::npos);
    CHECK(state.find("\"sigma_g\"") != std::string::npos);

    // capacity-curve plot consumes the emitted CSV
    CHECK(cmd_plot("capacity-curve", {dir + "/capacity_curve.csv"}, dir + "/curve.svg") ==
          kExitOk);
    CHECK(fs::exists(dir + "/curve.svg"));
}

TEST_CASE("train replay from the identical config is bit-exact") {
    const std::string dir_a = fresh_dir("replay_a");
    const std::string dir_b = fresh_dir("replay_b");
    ExperimentConfig cfg = tiny_config(dir_a);
    cfg.train.baseline_steps = 40;
    cfg.train.reweight_steps = 10;
    CHECK(cmd_train(cfg) == kExitOk);
    cfg.out_dir = dir_b;
    CHECK(cmd_train(cfg) == kExitOk);
    CHECK(slurp(dir_a + "/metrics.csv") == slurp(dir_b + "/metrics.csv"));
    CHECK(slurp(dir_a + "/trend.csv") == slurp(dir_b + "/trend.csv"));
    CHECK(slurp(dir_a + "/model.ckpt") == slurp(dir_b + "/model.ckpt"));
    CHECK(slurp(dir_a + "/config.txt") == slurp(dir_b + "/config.txt"));
}
