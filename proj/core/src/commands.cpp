#include "vrbq/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vrbq/image_io.hpp"

namespace vrbq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve_output_dir(const std::string& from_config,
                               const std::optional<std::string>& override_dir) {
    if (override_dir && !override_dir->empty()) return *override_dir;
    if (const char* env = std::getenv("VRBQ_OUTPUT_DIR"); env && *env) return env;
    return from_config;
}

std::string ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RbfLayer layer_from_config(const RunConfig& cfg) {
    if (!cfg.layer.file.empty()) {
        RbfLayer layer = load_layer(cfg.layer.file);
        if (layer.width() != cfg.env.width || layer.height() != cfg.env.height ||
            layer.channels() != cfg.env.channels)
            throw ConfigError("layer file geometry does not match env config");
        return layer;
    }
    return sample_layer(cfg.layer.seed, cfg.layer.neurons, cfg.env.width, cfg.env.height,
                        cfg.env.channels, cfg.layer.sigma_xy_lo, cfg.layer.sigma_xy_hi,
                        cfg.layer.sigma_z);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write: " + path);
    out << text;
    if (!out.flush()) throw IoError("write failed: " + path);
}

}  // namespace

TrainArtifacts run_train(const std::string& config_path, const TrainOverrides& overrides) {
    RunConfig cfg = load_run_config(config_path);
    if (overrides.total_steps) cfg.train.total_steps = *overrides.total_steps;
    if (overrides.learning_rate) cfg.train.learning_rate = *overrides.learning_rate;
    if (overrides.batch_size) cfg.train.batch_size = *overrides.batch_size;
    if (overrides.neurons) cfg.layer.neurons = *overrides.neurons;
    cfg.output_dir = resolve_output_dir(cfg.output_dir, overrides.output_dir);
    cfg.validate();

    TrainArtifacts artifacts;
    artifacts.output_dir = ensure_dir(cfg.output_dir);
    const std::string started = iso_utc_now();
    const auto t0 = std::chrono::steady_clock::now();

    json manifest;
    manifest["artifact_version"] = kArtifactVersion;
    manifest["config"] = json::parse(run_config_to_json(cfg));
    manifest["config_path"] = config_path;
    manifest["seeds"] = cfg.train.seeds;
    manifest["started_at"] = started;

    auto finalize = [&](const std::string& status) {
        manifest["layer_file"] = artifacts.layer_path;
        manifest["checkpoints"] = artifacts.checkpoint_paths;
        manifest["train_logs"] = artifacts.log_paths;
        manifest["finished_at"] = iso_utc_now();
        manifest["duration_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        manifest["status"] = status;
        artifacts.manifest_path = artifacts.output_dir + "/manifest.json";
        write_text(artifacts.manifest_path, manifest.dump(2) + "\n");
    };

    try {
        const RbfLayer layer = layer_from_config(cfg);
        artifacts.layer_path = artifacts.output_dir + "/layer.bin";
        save_layer(layer, artifacts.layer_path);

        for (std::uint64_t seed : cfg.train.seeds) {
            auto env = make_env(cfg.scenario, cfg.env);
            const TrainResult result = train(*env, layer, cfg.train, seed);

            const std::string ck =
                artifacts.output_dir + "/checkpoint_seed" + std::to_string(seed) + ".bin";
            const std::string log =
                artifacts.output_dir + "/train_log_seed" + std::to_string(seed) + ".csv";
            save_checkpoint(result.head, ck);
            write_train_log_csv(result.log, log);
            artifacts.checkpoint_paths.push_back(ck);
            artifacts.log_paths.push_back(log);
        }
    } catch (const NumericError& e) {
        finalize(std::string("failed: numeric error: ") + e.what());
        throw;
    }

    finalize("complete");
    return artifacts;
}

EvalArtifacts run_eval(const EvalArgs& args) {
    const RunConfig cfg = load_run_config(args.config_path);
    const std::string out_dir =
        ensure_dir(resolve_output_dir(cfg.output_dir, args.output_dir));

    RbfLayer layer = load_layer(args.layer_path);
    QHead head = load_checkpoint(args.checkpoint_path);
    if (layer.width() != cfg.env.width || layer.height() != cfg.env.height ||
        layer.channels() != cfg.env.channels)
        throw ConfigError("layer geometry does not match env config");
    if (head.feature_dim() != static_cast<Eigen::Index>(cfg.env.stack) * layer.size())
        throw ConfigError("checkpoint feature dimension does not match layer/stack");

    std::string suffix;
    if (!args.classification_csv.empty()) {
        NeuronClassification cls = read_classification_csv(args.classification_csv);
        PrunedNetwork pruned = prune_to_active(layer, head, cls);
        layer = std::move(pruned.layer);
        head = std::move(pruned.head);
        suffix = "_only_active";
    }

    const int episodes = args.episodes.value_or(cfg.train.eval_episodes);
    const std::vector<std::uint64_t> seeds = args.seeds.value_or(cfg.train.seeds);

    EvalArtifacts out;
    out.report = evaluate(cfg.scenario, cfg.env, layer, head, episodes, seeds, args.jobs);
    out.report_path = out_dir + "/eval_report" + suffix + ".csv";
    write_eval_report_csv(out.report, out.report_path);
    return out;
}

std::vector<std::string> run_analyze(const AnalyzeArgs& args) {
    const RunConfig cfg = load_run_config(args.config_path);
    const std::string out_dir =
        ensure_dir(resolve_output_dir(cfg.output_dir, args.output_dir));
    const int n_states = args.n_states.value_or(1000);
    const double threshold = args.threshold.value_or(0.01);

    std::vector<std::string> written;

    if (args.mode == "classify") {
        auto env = make_env(cfg.scenario, cfg.env);
        const std::vector<State> states =
            generate_calibration_states(*env, args.rollout_seed, n_states);

        std::vector<double> fractions;
        for (int j = 0; j < std::max(1, args.layer_seeds); ++j) {
            RunConfig layer_cfg = cfg;
            layer_cfg.layer.seed = cfg.layer.seed + static_cast<std::uint64_t>(j);
            if (args.layer_seeds > 1) layer_cfg.layer.file.clear();
            if (!args.layer_path.empty() && args.layer_seeds <= 1)
                layer_cfg.layer.file = args.layer_path;
            const RbfLayer layer = layer_from_config(layer_cfg);
            const NeuronClassification cls = classify_neurons(layer, states, threshold);
            fractions.push_back(cls.active_fraction());

            const std::string path = out_dir + "/classification_seed" +
                                     std::to_string(layer_cfg.layer.seed) + ".csv";
            write_classification_csv(cls, path);
            written.push_back(path);
        }

        double mean = 0.0;
        for (double f : fractions) mean += f;
        mean /= static_cast<double>(fractions.size());
        double var = 0.0;
        for (double f : fractions) var += (f - mean) * (f - mean);
        const double stddev = std::sqrt(var / static_cast<double>(fractions.size()));

        const std::string summary = out_dir + "/classification_summary.csv";
        std::string text = "layer_seed,active_fraction\n";
        for (std::size_t j = 0; j < fractions.size(); ++j) {
            char line[80];
            std::snprintf(line, sizeof line, "%llu,%.17g\n",
                          static_cast<unsigned long long>(cfg.layer.seed + j), fractions[j]);
            text += line;
        }
        {
            char line[120];
            std::snprintf(line, sizeof line, "mean,%.17g\nstd,%.17g\n", mean, stddev);
            text += line;
        }
        write_text(summary, text);
        written.push_back(summary);
        return written;
    }

    if (args.mode == "diff") {
        auto env = make_env(cfg.scenario, cfg.env);
        const int needed = std::max({n_states, args.state_a + 1, args.state_b + 1});
        const std::vector<State> states =
            generate_calibration_states(*env, args.rollout_seed, needed);
        RunConfig layer_cfg = cfg;
        if (!args.layer_path.empty()) layer_cfg.layer.file = args.layer_path;
        const RbfLayer layer = layer_from_config(layer_cfg);
        const NeuronClassification cls = classify_neurons(layer, states, threshold);
        const State& sa = states[static_cast<std::size_t>(args.state_a)];
        const State& sb = states[static_cast<std::size_t>(args.state_b)];
        const ActivationDiff diff = activation_diff(layer, sa, sb, cls);

        const std::string hist = out_dir + "/diff_histogram.csv";
        write_diff_histogram_csv(diff, 50, hist);
        written.push_back(hist);

        // Fig-2-style maps: centers of neurons whose activation changed more
        // than the threshold, drawn over |s - s2|.
        auto changed_centers = [&](const std::vector<int>& group) {
            std::vector<std::pair<double, double>> centers;
            for (int i : group)
                if (diff.delta[static_cast<std::size_t>(i)] > threshold)
                    centers.push_back(diff.centers[static_cast<std::size_t>(i)]);
            return centers;
        };
        const std::string map_a = out_dir + "/diff_overlay_active.pgm";
        const std::string map_i = out_dir + "/diff_overlay_inactive.pgm";
        write_diff_overlay(sa.newest(), sb.newest(), changed_centers(diff.active), map_a);
        write_diff_overlay(sa.newest(), sb.newest(), changed_centers(diff.inactive), map_i);
        written.push_back(map_a);
        written.push_back(map_i);
        return written;
    }

    if (args.mode == "trace") {
        auto env = make_env(cfg.scenario, cfg.env);
        RunConfig layer_cfg = cfg;
        if (!args.layer_path.empty()) layer_cfg.layer.file = args.layer_path;
        const RbfLayer layer = layer_from_config(layer_cfg);
        const NeuronTrace trace = neuron_trace(layer, *env, args.rollout_seed, args.samples,
                                               args.neuron, args.trace_threshold);
        const std::string path =
            out_dir + "/trace_neuron" + std::to_string(args.neuron) + ".csv";
        write_trace_csv(trace, path);
        written.push_back(path);
        return written;
    }

    throw ConfigError("unknown analyze mode '" + args.mode +
                      "' (expected classify, diff, or trace)");
}

std::vector<std::string> run_render_episode(const RenderArgs& args) {
    const RunConfig cfg = load_run_config(args.config_path);
    const std::string out_dir =
        ensure_dir(resolve_output_dir(cfg.output_dir, args.output_dir));

    const RbfLayer layer = load_layer(args.layer_path);
    const QHead head = load_checkpoint(args.checkpoint_path);
    if (layer.width() != cfg.env.width || layer.height() != cfg.env.height ||
        layer.channels() != cfg.env.channels)
        throw ConfigError("layer geometry does not match env config");
    if (head.feature_dim() != static_cast<Eigen::Index>(cfg.env.stack) * layer.size())
        throw ConfigError("checkpoint feature dimension does not match layer/stack");

    auto env = make_env(cfg.scenario, cfg.env);
    std::vector<std::string> written;
    const char* ext = cfg.env.channels == 1 ? ".pgm" : ".ppm";

    State state = env->reset(args.episode_seed);
    TrajectoryLog log(out_dir + "/trajectory.csv");

    int decision = 0;
    {
        const std::string path = out_dir + "/frame_0000" + ext;
        write_frame_image(state.newest(), path);
        written.push_back(path);
    }
    FeatureVector features = activate_state(layer, state);
    while (!env->done()) {
        const int action = greedy_action(head, features, nullptr, 0.0);
        const StepResult res = env->step(action);
        ++decision;
        log.row(0, env->ticks(), action, res.reward, res.terminal, env->status());

        char name[32];
        std::snprintf(name, sizeof name, "/frame_%04d", decision);
        const std::string path = out_dir + name + ext;
        write_frame_image(res.state.newest(), path);
        written.push_back(path);
        features = activate_state(layer, res.state);
    }
    log.close();
    written.push_back(out_dir + "/trajectory.csv");
    return written;
}

}  // namespace vrbq
