#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrbq/envsim.hpp"
#include "vrbq/qlearn.hpp"
#include "vrbq/rbf.hpp"
#include "vrbq/replay.hpp"

namespace vrbq {

// Linear epsilon decay from start to end over decay_steps, beginning at
// decay_start. All-zero means pure greedy (the V-RBQN setting).
struct EpsilonSchedule {
    double start = 0.0;
    double end = 0.0;
    std::int64_t decay_start = 0;
    std::int64_t decay_steps = 0;

    double at(std::int64_t step) const;
};

struct TrainConfig {
    std::int64_t total_steps = 20000;
    std::size_t batch_size = 256;
    double learning_rate = 0.01;
    double gamma = 0.99;
    EpsilonSchedule epsilon;
    // Bootstrap from a frozen copy refreshed every N optimizer steps; absent =
    // bootstrap from the live head (the V-RBQN setting).
    std::optional<std::int64_t> target_update_period;
    std::size_t replay_capacity = 100000;
    int eval_episodes = 100;
    std::vector<std::uint64_t> seeds = {1};

    void validate() const;
};

// One completed episode. `step` is the cumulative agent-step count at episode
// end; `loss` the mean optimizer loss over the episode (0 before learning
// starts).
struct EpisodeLogRow {
    std::int64_t step = 0;
    int episode = 0;
    double episode_return = 0.0;
    double loss = 0.0;
    double epsilon = 0.0;
    int alive_ticks = 0;
};

struct TrainResult {
    QHead head;
    std::vector<EpisodeLogRow> log;
};

// Zero initialization: initial Q is 0 everywhere, so the first greedy action
// is index 0 by the tie rule.
QHead weight_init(int n_actions, Eigen::Index n_features, double learning_rate);

// Trains one run: greedy (or epsilon-scheduled) acting, feature-space replay,
// one Adam step per agent step once the buffer holds a full batch. Fully
// deterministic given (config, run_seed).
TrainResult train(Env& env, const RbfLayer& layer, const TrainConfig& cfg,
                  std::uint64_t run_seed);

struct SeedEval {
    std::uint64_t seed = 0;
    double mean_return = 0.0;
    double std_return = 0.0;
    double mean_alive_ticks = 0.0;
};

struct EvalReport {
    std::vector<SeedEval> per_seed;
    double mean_return = 0.0;   // pooled over every episode of every seed
    double std_return = 0.0;
    double mean_alive_ticks = 0.0;
    int episodes_per_seed = 0;
};

// Pure greedy rollouts, no learning. One fresh env instance per seed; seeds
// may be evaluated on up to `jobs` threads, results aggregated in seed order.
EvalReport evaluate(Scenario scenario, const EnvConfig& env_cfg, const RbfLayer& layer,
                    const QHead& head, int episodes, const std::vector<std::uint64_t>& seeds,
                    int jobs = 1);

struct PolicyStats {
    double mean_return = 0.0;
    double std_return = 0.0;
    double mean_alive_ticks = 0.0;
};

// Uniform-random baseline, measured the same way evaluate() measures greedy
// policies.
PolicyStats random_policy_stats(Scenario scenario, const EnvConfig& env_cfg, int episodes,
                                std::uint64_t seed);

void write_train_log_csv(const std::vector<EpisodeLogRow>& log, const std::string& path);
void write_eval_report_csv(const EvalReport& report, const std::string& path);

}  // namespace vrbq
