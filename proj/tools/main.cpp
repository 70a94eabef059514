// vrbq: train, evaluate, analyze, and render visual RBF Q-network experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime/numeric error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrbq/commands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Visual RBF Q-network trainer and analysis toolkit"};
    app.require_subcommand(1);

    // train
    std::string train_config;
    vrbq::TrainOverrides overrides;
    std::string train_out;
    long long train_steps = -1;
    double train_lr = -1.0;
    long long train_batch = -1;
    int train_neurons = -1;
    auto* train_cmd = app.add_subcommand("train", "Sample/load a layer and train Q-heads");
    train_cmd->add_option("-c,--config", train_config, "Run configuration (JSON)")->required();
    train_cmd->add_option("--output-dir", train_out, "Override output directory");
    train_cmd->add_option("--total-steps", train_steps, "Override train.total_steps");
    train_cmd->add_option("--learning-rate", train_lr, "Override train.learning_rate");
    train_cmd->add_option("--batch-size", train_batch, "Override train.batch_size");
    train_cmd->add_option("--neurons", train_neurons, "Override layer.neurons");

    // eval
    vrbq::EvalArgs eval_args;
    std::string eval_out;
    int eval_episodes = -1;
    std::vector<std::uint64_t> eval_seeds;
    auto* eval_cmd = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
    eval_cmd->add_option("-c,--config", eval_args.config_path, "Run configuration (JSON)")
        ->required();
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint_path, "Q-head checkpoint")
        ->required();
    eval_cmd->add_option("--layer", eval_args.layer_path, "Layer file")->required();
    eval_cmd->add_option("--episodes", eval_episodes, "Episodes per seed");
    eval_cmd->add_option("--seeds", eval_seeds, "Evaluation seeds");
    eval_cmd->add_option("--only-active", eval_args.classification_csv,
                         "Classification CSV; evaluate with inactive neurons removed");
    eval_cmd->add_option("--jobs", eval_args.jobs, "Parallel seed evaluations");
    eval_cmd->add_option("--output-dir", eval_out, "Override output directory");

    // analyze
    vrbq::AnalyzeArgs an_args;
    std::string an_out;
    int an_states = -1;
    double an_threshold = -1.0;
    auto* an_cmd = app.add_subcommand("analyze", "Neuron activity analyses");
    an_cmd->add_option("-c,--config", an_args.config_path, "Run configuration (JSON)")
        ->required();
    an_cmd->add_option("--mode", an_args.mode, "classify | diff | trace")->required();
    an_cmd->add_option("--layer", an_args.layer_path, "Layer file (default: sample from config)");
    an_cmd->add_option("--states", an_states, "Calibration states (default 1000)");
    an_cmd->add_option("--threshold", an_threshold, "Active/inactive threshold (default 0.01)");
    an_cmd->add_option("--layer-seeds", an_args.layer_seeds,
                       "classify: number of consecutive layer seeds");
    an_cmd->add_option("--state-a", an_args.state_a, "diff: first state index");
    an_cmd->add_option("--state-b", an_args.state_b, "diff: second state index");
    an_cmd->add_option("--neuron", an_args.neuron, "trace: neuron index");
    an_cmd->add_option("--samples", an_args.samples, "trace: sample count");
    an_cmd->add_option("--trace-threshold", an_args.trace_threshold,
                       "trace: activation flag threshold");
    an_cmd->add_option("--rollout-seed", an_args.rollout_seed, "Calibration rollout seed");
    an_cmd->add_option("--output-dir", an_out, "Override output directory");

    // render-episode
    vrbq::RenderArgs render_args;
    std::string render_out;
    auto* render_cmd =
        app.add_subcommand("render-episode", "Dump frames of one greedy episode");
    render_cmd->add_option("-c,--config", render_args.config_path, "Run configuration (JSON)")
        ->required();
    render_cmd->add_option("--checkpoint", render_args.checkpoint_path, "Q-head checkpoint")
        ->required();
    render_cmd->add_option("--layer", render_args.layer_path, "Layer file")->required();
    render_cmd->add_option("--episode-seed", render_args.episode_seed, "Episode seed");
    render_cmd->add_option("--output-dir", render_out, "Override output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            if (!train_out.empty()) overrides.output_dir = train_out;
            if (train_steps >= 0) overrides.total_steps = train_steps;
            if (train_lr > 0.0) overrides.learning_rate = train_lr;
            if (train_batch > 0) overrides.batch_size = static_cast<std::size_t>(train_batch);
            if (train_neurons > 0) overrides.neurons = train_neurons;
            const vrbq::TrainArtifacts art = vrbq::run_train(train_config, overrides);
            std::printf("manifest: %s\n", art.manifest_path.c_str());
        } else if (*eval_cmd) {
            if (eval_episodes > 0) eval_args.episodes = eval_episodes;
            if (!eval_seeds.empty()) eval_args.seeds = eval_seeds;
            if (!eval_out.empty()) eval_args.output_dir = eval_out;
            const vrbq::EvalArtifacts art = vrbq::run_eval(eval_args);
            std::printf("report: %s\nmean_return: %.6g\nstd_return: %.6g\n",
                        art.report_path.c_str(), art.report.mean_return,
                        art.report.std_return);
        } else if (*an_cmd) {
            if (an_states > 0) an_args.n_states = an_states;
            if (an_threshold >= 0.0) an_args.threshold = an_threshold;
            if (!an_out.empty()) an_args.output_dir = an_out;
            for (const std::string& path : vrbq::run_analyze(an_args))
                std::printf("%s\n", path.c_str());
        } else if (*render_cmd) {
            if (!render_out.empty()) render_args.output_dir = render_out;
            const std::vector<std::string> paths = vrbq::run_render_episode(render_args);
            std::printf("wrote %zu files under %s\n", paths.size(),
                        paths.empty() ? "(none)" : paths.front().c_str());
        }
    } catch (const vrbq::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
