#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vrbq/errors.hpp"
#include "vrbq/rbf.hpp"
#include "vrbq/rng.hpp"

namespace vrbq {

enum class Scenario { shooter, gather };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario s);

struct EnvConfig {
    int width = 32;
    int height = 32;
    int channels = 1;    // 1 = gray, 3 = rgb
    int skip_frames = 6;
    int stack = 2;       // frames per state
    int timeout = 0;     // ticks; 0 = scenario default (300 shooter, 2100 gather)
    std::uint64_t seed = 0;

    void validate() const;
};

struct StepResult {
    State state;
    double reward = 0.0;
    bool terminal = false;
};

// Ground-truth simulator pose, used by the neuron-trace analysis.
struct AgentPose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // radians; 0 faces +y, positive turns right
};

// A pixel-rendered episodic task in the unit room [0,1]^2. One instance is
// single-threaded; run separate instances for parallel evaluation.
class Env {
public:
    virtual ~Env() = default;

    virtual int action_count() const = 0;
    const EnvConfig& config() const { return cfg_; }
    int timeout_ticks() const;

    // Re-randomizes per-episode entities from (config.seed, episode_seed) and
    // returns the initial stack (first frame duplicated).
    State reset(std::uint64_t episode_seed);

    // Applies the action for config.skip_frames consecutive ticks.
    StepResult step(int action);

    // Same, with an explicit tick count; 0 ticks re-renders without simulating
    // (used by the calibration-state generator's random skip in [0,12]).
    StepResult step_with_skip(int action, int ticks);

    // Pure function of the current simulator state.
    virtual Frame render() const = 0;

    virtual AgentPose pose() const = 0;
    // Scenario status for trajectory logs: remaining life (gather) or target
    // bearing in radians (shooter).
    virtual double status() const = 0;

    bool done() const { return terminal_; }
    int ticks() const { return ticks_; }

protected:
    explicit Env(const EnvConfig& cfg);

    virtual void reset_entities(Rng& episode_rng) = 0;
    // One simulator tick under `action`; returns the tick reward and may set
    // terminal_ via finish().
    virtual double tick(int action) = 0;

    void finish() { terminal_ = true; }

    EnvConfig cfg_;

private:
    void push_frame(Frame f);
    State current_state() const;

    std::vector<Frame> stack_;
    int ticks_ = 0;
    bool terminal_ = true;  // unusable until the first reset
    bool started_ = false;
};

std::unique_ptr<Env> make_env(Scenario scenario, const EnvConfig& cfg);

// Shooting task: fixed agent spawn, one target at a random lateral position on
// the far line. Actions: move right, move left, shoot, turn left, turn right,
// move forward, move backward, no-op. Hit +101 (ends the episode), missed shot
// -5, every tick -1, timeout 300 ticks.
class ShooterEnv final : public Env {
public:
    explicit ShooterEnv(const EnvConfig& cfg) : Env(cfg) {}

    int action_count() const override { return 8; }
    Frame render() const override;
    AgentPose pose() const override { return {agent_x_, agent_y_, heading_}; }
    double status() const override { return target_bearing(); }

    double target_x() const { return target_x_; }
    double target_bearing() const;
    double target_distance() const;

protected:
    void reset_entities(Rng& episode_rng) override;
    double tick(int action) override;

private:
    bool shot_hits() const;

    double agent_x_ = 0.5;
    double agent_y_ = 0.15;
    double heading_ = 0.0;
    double target_x_ = 0.5;
    double target_y_ = 0.85;
};

// Health-gathering task: agent spawns mid-room, packs spawn at random, life
// decays 1 point per tick and a pickup restores 25 (capped at 100, pack
// respawns elsewhere). Reward per tick is the life delta; the episode ends at
// zero life or after 2100 ticks. Actions: forward, backward, turn left, turn
// right, no-op.
class GatherEnv final : public Env {
public:
    explicit GatherEnv(const EnvConfig& cfg) : Env(cfg) {}

    int action_count() const override { return 5; }
    Frame render() const override;
    AgentPose pose() const override { return {agent_x_, agent_y_, heading_}; }
    double status() const override { return static_cast<double>(life_); }

    int life() const { return life_; }
    const std::vector<std::pair<double, double>>& packs() const { return packs_; }

protected:
    void reset_entities(Rng& episode_rng) override;
    double tick(int action) override;

private:
    void respawn_pack(std::size_t idx);

    double agent_x_ = 0.5;
    double agent_y_ = 0.5;
    double heading_ = 0.0;
    int life_ = 100;
    std::vector<std::pair<double, double>> packs_;
    Rng pack_rng_{0};  // dedicated stream so pack respawns stay episode-deterministic
};

// Appends one row per tick: episode, tick, action, reward, terminal, status.
class TrajectoryLog {
public:
    explicit TrajectoryLog(const std::string& path);
    void row(int episode, int tick, int action, double reward, bool terminal, double status);
    void close();

private:
    std::string path_;
    std::string buffer_;
};

}  // namespace vrbq
