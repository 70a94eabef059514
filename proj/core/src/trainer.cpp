#include "vrbq/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>

namespace vrbq {

namespace {

// seed-stream tags
constexpr std::uint64_t kAgentStream = 0xa9e27;
constexpr std::uint64_t kReplayStream = 0x5a3b1;
constexpr std::uint64_t kEpisodeStream = 0xe915;
constexpr std::uint64_t kEvalStream = 0xec57;

std::uint64_t episode_seed(std::uint64_t run_seed, std::uint64_t episode) {
    return derive_seed(derive_seed(run_seed, kEpisodeStream), episode);
}

void check_layer_matches(const Env& env, const RbfLayer& layer) {
    const EnvConfig& c = env.config();
    if (layer.width() != c.width || layer.height() != c.height ||
        layer.channels() != c.channels)
        throw ConfigError("layer geometry does not match environment frames");
}

// Rolling per-frame activation cache. The newest frame is the only one whose
// activation has not been computed on a previous step, so each agent step
// costs one activate() call; concatenation reproduces activate_state exactly.
class FeatureStack {
public:
    FeatureStack(const RbfLayer& layer, const State& initial) : layer_(&layer) {
        reset(initial);
    }

    void reset(const State& initial) {
        slots_.assign(initial.frames.size(), FeatureVector());
        const FeatureVector h = activate(*layer_, initial.frames.back());
        for (auto& s : slots_) s = h;  // reset duplicates the first frame
    }

    void advance(const Frame& newest) {
        slots_.erase(slots_.begin());
        slots_.push_back(activate(*layer_, newest));
    }

    FeatureVector concatenated() const {
        const Eigen::Index n = layer_->size();
        FeatureVector out(static_cast<Eigen::Index>(slots_.size()) * n);
        for (std::size_t k = 0; k < slots_.size(); ++k)
            out.segment(static_cast<Eigen::Index>(k) * n, n) = slots_[k];
        return out;
    }

private:
    const RbfLayer* layer_;
    std::vector<FeatureVector> slots_;
};

struct EpisodeOutcome {
    double episode_return = 0.0;
    int alive_ticks = 0;
};

EpisodeOutcome greedy_episode(Env& env, const RbfLayer& layer, const QHead& head,
                              std::uint64_t seed) {
    EpisodeOutcome out;
    FeatureStack feats(layer, env.reset(seed));
    while (!env.done()) {
        const int action = greedy_action(head, feats.concatenated(), nullptr, 0.0);
        const StepResult res = env.step(action);
        out.episode_return += res.reward;
        feats.advance(res.state.newest());
    }
    out.alive_ticks = env.ticks();
    return out;
}

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;  // population form, so a single episode reports 0
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    double acc = 0.0;
    for (double x : xs) acc += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(acc / static_cast<double>(xs.size()));
    return m;
}

SeedEval evaluate_seed(Scenario scenario, const EnvConfig& env_cfg, const RbfLayer& layer,
                       const QHead& head, int episodes, std::uint64_t seed,
                       std::vector<double>* pooled_returns) {
    auto env = make_env(scenario, env_cfg);
    std::vector<double> returns;
    returns.reserve(static_cast<std::size_t>(episodes));
    double alive = 0.0;
    for (int e = 0; e < episodes; ++e) {
        const EpisodeOutcome out = greedy_episode(
            *env, layer, head, episode_seed(derive_seed(seed, kEvalStream), static_cast<std::uint64_t>(e)));
        returns.push_back(out.episode_return);
        alive += out.alive_ticks;
    }
    const Moments m = moments(returns);
    if (pooled_returns)
        pooled_returns->insert(pooled_returns->end(), returns.begin(), returns.end());
    return {seed, m.mean, m.stddev, alive / std::max(1, episodes)};
}

}  // namespace

double EpsilonSchedule::at(std::int64_t step) const {
    if (decay_steps <= 0) return step < decay_start ? start : end;
    if (step < decay_start) return start;
    const double frac =
        std::min(1.0, static_cast<double>(step - decay_start) / static_cast<double>(decay_steps));
    return start + frac * (end - start);
}

void TrainConfig::validate() const {
    if (total_steps < 0) throw ConfigError("total_steps must be >= 0");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must lie in [0,1]");
    for (double e : {epsilon.start, epsilon.end})
        if (e < 0.0 || e > 1.0) throw ConfigError("epsilon values must lie in [0,1]");
    if (target_update_period && *target_update_period <= 0)
        throw ConfigError("target_update_period must be positive when set");
    if (replay_capacity == 0) throw ConfigError("replay_capacity must be positive");
    if (eval_episodes < 0) throw ConfigError("eval_episodes must be >= 0");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
}

QHead weight_init(int n_actions, Eigen::Index n_features, double learning_rate) {
    return QHead(n_actions, n_features, learning_rate);
}

TrainResult train(Env& env, const RbfLayer& layer, const TrainConfig& cfg,
                  std::uint64_t run_seed) {
    cfg.validate();
    check_layer_matches(env, layer);

    const Eigen::Index feature_dim =
        static_cast<Eigen::Index>(env.config().stack) * layer.size();
    TrainResult result{weight_init(env.action_count(), feature_dim, cfg.learning_rate), {}};
    QHead& head = result.head;
    std::optional<QHead> target_head;

    ReplayBuffer buffer(cfg.replay_capacity);
    Rng agent_rng(derive_seed(run_seed, kAgentStream));
    Rng replay_rng(derive_seed(run_seed, kReplayStream));

    std::uint64_t episode = 0;
    FeatureStack feats(layer, env.reset(episode_seed(run_seed, episode)));
    FeatureVector features = feats.concatenated();

    double ep_return = 0.0;
    double ep_loss_sum = 0.0;
    std::int64_t ep_loss_count = 0;
    std::int64_t optimizer_steps = 0;
    double epsilon = cfg.epsilon.at(0);

    for (std::int64_t step = 1; step <= cfg.total_steps; ++step) {
        epsilon = cfg.epsilon.at(step - 1);
        const int action = greedy_action(head, features, &agent_rng, epsilon);
        const StepResult res = env.step(action);
        feats.advance(res.state.newest());
        FeatureVector next_features = feats.concatenated();

        buffer.push({features, action, res.reward, next_features, res.terminal});
        ep_return += res.reward;

        if (buffer.size() >= cfg.batch_size) {
            const TdBatch batch = buffer.sample_uniform(cfg.batch_size, replay_rng);
            Eigen::VectorXd targets;
            if (cfg.target_update_period) {
                if (optimizer_steps % *cfg.target_update_period == 0) target_head = head;
                targets = td_target(batch, *target_head, cfg.gamma);
            } else {
                targets = td_target(batch, head, cfg.gamma);
            }
            const LossGrad lg = loss_and_gradient(batch, head, targets);
            adam_step(head, lg.grad);
            ++optimizer_steps;
            ep_loss_sum += lg.loss;
            ++ep_loss_count;
        }

        if (res.terminal) {
            result.log.push_back({step, static_cast<int>(episode), ep_return,
                                  ep_loss_count ? ep_loss_sum / ep_loss_count : 0.0, epsilon,
                                  env.ticks()});
            ++episode;
            feats.reset(env.reset(episode_seed(run_seed, episode)));
            features = feats.concatenated();
            ep_return = 0.0;
            ep_loss_sum = 0.0;
            ep_loss_count = 0;
        } else {
            features = std::move(next_features);
        }
    }
    return result;
}

EvalReport evaluate(Scenario scenario, const EnvConfig& env_cfg, const RbfLayer& layer,
                    const QHead& head, int episodes, const std::vector<std::uint64_t>& seeds,
                    int jobs) {
    if (episodes <= 0) throw ConfigError("evaluation needs at least one episode");
    if (seeds.empty()) throw ConfigError("evaluation needs at least one seed");
    jobs = std::max(1, jobs);

    EvalReport report;
    report.episodes_per_seed = episodes;
    report.per_seed.resize(seeds.size());
    std::vector<std::vector<double>> pooled(seeds.size());

    for (std::size_t begin = 0; begin < seeds.size(); begin += static_cast<std::size_t>(jobs)) {
        const std::size_t end = std::min(seeds.size(), begin + static_cast<std::size_t>(jobs));
        std::vector<std::future<SeedEval>> futures;
        for (std::size_t i = begin; i < end; ++i) {
            futures.push_back(std::async(std::launch::async, [&, i] {
                return evaluate_seed(scenario, env_cfg, layer, head, episodes, seeds[i],
                                     &pooled[i]);
            }));
        }
        for (std::size_t i = begin; i < end; ++i)
            report.per_seed[i] = futures[i - begin].get();
    }

    std::vector<double> all_returns;
    double alive = 0.0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        all_returns.insert(all_returns.end(), pooled[i].begin(), pooled[i].end());
        alive += report.per_seed[i].mean_alive_ticks;
    }
    const Moments m = moments(all_returns);
    report.mean_return = m.mean;
    report.std_return = m.stddev;
    report.mean_alive_ticks = alive / static_cast<double>(seeds.size());
    return report;
}

PolicyStats random_policy_stats(Scenario scenario, const EnvConfig& env_cfg, int episodes,
                                std::uint64_t seed) {
    if (episodes <= 0) throw ConfigError("baseline needs at least one episode");
    auto env = make_env(scenario, env_cfg);
    Rng rng(derive_seed(seed, kAgentStream));
    std::vector<double> returns;
    double alive = 0.0;
    for (int e = 0; e < episodes; ++e) {
        env->reset(episode_seed(seed, static_cast<std::uint64_t>(e)));
        double ret = 0.0;
        while (!env->done()) {
            const int action = static_cast<int>(
                uniform_index(rng, static_cast<std::size_t>(env->action_count())));
            ret += env->step(action).reward;
        }
        returns.push_back(ret);
        alive += env->ticks();
    }
    const Moments m = moments(returns);
    return {m.mean, m.stddev, alive / episodes};
}

void write_train_log_csv(const std::vector<EpisodeLogRow>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write training log: " + path);
    out << "step,episode,return,loss,epsilon,alive_ticks\n";
    char line[200];
    for (const EpisodeLogRow& row : log) {
        std::snprintf(line, sizeof line, "%lld,%d,%.17g,%.17g,%.17g,%d\n",
                      static_cast<long long>(row.step), row.episode, row.episode_return,
                      row.loss, row.epsilon, row.alive_ticks);
        out << line;
    }
    if (!out.flush()) throw IoError("training log write failed: " + path);
}

void write_eval_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write eval report: " + path);
    out << "seed,episodes,mean_return,std_return,mean_alive_ticks\n";
    char line[200];
    for (const SeedEval& s : report.per_seed) {
        std::snprintf(line, sizeof line, "%llu,%d,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(s.seed), report.episodes_per_seed,
                      s.mean_return, s.std_return, s.mean_alive_ticks);
        out << line;
    }
    std::snprintf(line, sizeof line, "aggregate,%d,%.17g,%.17g,%.17g\n",
                  report.episodes_per_seed * static_cast<int>(report.per_seed.size()),
                  report.mean_return, report.std_return, report.mean_alive_ticks);
    out << line;
    if (!out.flush()) throw IoError("eval report write failed: " + path);
}

}  // namespace vrbq
