#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrbq/analysis.hpp"
#include "vrbq/run_config.hpp"
#include "vrbq/trainer.hpp"

namespace vrbq {

// Command implementations shared by the CLI binary and the test suites.
// Output directory precedence: explicit override > $VRBQ_OUTPUT_DIR > config.

inline constexpr const char* kArtifactVersion = "0.1.0";

struct TrainOverrides {
    std::optional<std::string> output_dir;
    std::optional<std::int64_t> total_steps;
    std::optional<double> learning_rate;
    std::optional<std::size_t> batch_size;
    std::optional<int> neurons;
};

struct TrainArtifacts {
    std::string output_dir;
    std::string manifest_path;
    std::string layer_path;
    std::vector<std::string> checkpoint_paths;  // one per training seed
    std::vector<std::string> log_paths;
};

TrainArtifacts run_train(const std::string& config_path, const TrainOverrides& overrides = {});

struct EvalArgs {
    std::string config_path;
    std::string checkpoint_path;
    std::string layer_path;
    std::optional<int> episodes;                  // default: train.eval_episodes
    std::optional<std::vector<std::uint64_t>> seeds;  // default: train.seeds
    std::string classification_csv;               // non-empty: evaluate pruned network
    int jobs = 1;
    std::optional<std::string> output_dir;
};

struct EvalArtifacts {
    EvalReport report;
    std::string report_path;
};

EvalArtifacts run_eval(const EvalArgs& args);

struct AnalyzeArgs {
    std::string config_path;
    std::string mode;            // classify | diff | trace
    std::string layer_path;      // non-empty: load instead of sampling
    std::optional<int> n_states;         // classify/diff calibration set size (default 1000)
    std::optional<double> threshold;     // classification threshold (default 0.01)
    int layer_seeds = 1;                 // classify: distinct layer seeds
    int state_a = 0;                     // diff
    int state_b = 1;
    int neuron = 0;                      // trace
    int samples = 5000;
    double trace_threshold = 0.5;
    std::uint64_t rollout_seed = 1;
    std::optional<std::string> output_dir;
};

std::vector<std::string> run_analyze(const AnalyzeArgs& args);  // written artifact paths

struct RenderArgs {
    std::string config_path;
    std::string checkpoint_path;
    std::string layer_path;
    std::uint64_t episode_seed = 0;
    std::optional<std::string> output_dir;
};

std::vector<std::string> run_render_episode(const RenderArgs& args);

}  // namespace vrbq
