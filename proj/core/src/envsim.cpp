#include "vrbq/envsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <utility>

namespace vrbq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFov = kPi / 2.0;  // horizontal field of view
constexpr double kWallMargin = 0.05;

// Shooter motion/geometry
constexpr double kStrafeStep = 0.008;
constexpr double kMoveStep = 0.02;
constexpr double kShooterTurn = kPi / 48.0;
constexpr double kTargetRadius = 0.03;
constexpr int kShotCooldownTicks = 6;  // one shot per skip-6 decision

// Gather motion/geometry
constexpr double kGatherMove = 0.02;
constexpr double kGatherTurn = kPi / 48.0;
constexpr double kPickupRadius = 0.07;
constexpr double kPackVisualRadius = 0.05;
constexpr int kPackCount = 4;
constexpr int kLifeMax = 100;
constexpr int kLifeDecayPerTick = 1;
constexpr int kLifePerPack = 25;

// Projection constants (fractions of image height)
constexpr double kWallScale = 0.20;
constexpr double kTargetScale = 0.10;
constexpr double kPackScale = 0.035;
constexpr double kFloorDrop = 0.055;

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double column_angle(int col, int width) {
    return ((col + 0.5) / static_cast<double>(width) - 0.5) * kFov;
}

struct WallHit {
    double dist = 0.0;
    double perim = 0.0;  // position along the room perimeter, in [0,4)
};

// Nearest wall of the unit room hit by a ray from (px,py) with direction
// angle phi (0 faces +y, positive turns clockwise toward +x).
WallHit cast_wall(double px, double py, double phi) {
    const double dx = std::sin(phi);
    const double dy = std::cos(phi);
    WallHit best;
    best.dist = 1e30;
    auto consider = [&](double t, double perim) {
        if (t > 0.0 && t < best.dist) best = {t, perim};
    };
    if (dy > 1e-12) {  // north wall y=1
        const double t = (1.0 - py) / dy;
        consider(t, std::clamp(px + t * dx, 0.0, 1.0));
    }
    if (dx > 1e-12) {  // east wall x=1
        const double t = (1.0 - px) / dx;
        consider(t, 1.0 + (1.0 - std::clamp(py + t * dy, 0.0, 1.0)));
    }
    if (dy < -1e-12) {  // south wall y=0
        const double t = -py / dy;
        consider(t, 2.0 + (1.0 - std::clamp(px + t * dx, 0.0, 1.0)));
    }
    if (dx < -1e-12) {  // west wall x=0
        const double t = -px / dx;
        consider(t, 3.0 + std::clamp(py + t * dy, 0.0, 1.0));
    }
    return best;
}

struct Palette {
    double ceiling[3];
    double floor[3];
    // wall shade is a smooth function of the perimeter coordinate so that the
    // view encodes both heading and position
    double wall_amp;
    double wall_base;
    double wall_phase;
    double wall_tint[3];
};

constexpr Palette kShooterPalette = {
    {0.75, 0.76, 0.80}, {0.22, 0.20, 0.18}, 0.17, 0.50, 0.0, {1.0, 0.95, 0.90}};
constexpr Palette kGatherPalette = {
    {0.68, 0.70, 0.74}, {0.30, 0.27, 0.24}, 0.15, 0.48, 2.1, {0.95, 1.0, 0.92}};

double wall_shade(const Palette& pal, double perim) {
    return pal.wall_base + pal.wall_amp * std::sin(1.5 * kPi * perim + pal.wall_phase);
}

void put(Frame& f, int px, int py, const double rgb[3]) {
    if (f.channels == 1) {
        // ITU-R 601 luma keeps gray and rgb renders consistent
        f.at(0, px, py) = std::clamp(0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2], 0.0, 1.0);
    } else {
        for (int c = 0; c < 3; ++c) f.at(c, px, py) = std::clamp(rgb[c], 0.0, 1.0);
    }
}

void render_room(Frame& f, const Palette& pal, double ax, double ay, double heading) {
    const int w = f.width;
    const int h = f.height;
    const double horizon = h / 2.0;
    for (int col = 0; col < w; ++col) {
        const WallHit hit = cast_wall(ax, ay, heading + column_angle(col, w));
        const double hh = std::min(horizon, kWallScale * h / std::max(hit.dist, 1e-6));
        const double shade = wall_shade(pal, hit.perim);
        const double wall_rgb[3] = {shade * pal.wall_tint[0], shade * pal.wall_tint[1],
                                    shade * pal.wall_tint[2]};
        for (int row = 0; row < h; ++row) {
            const double yc = row + 0.5;
            if (yc < horizon - hh)
                put(f, col, row, pal.ceiling);
            else if (yc <= horizon + hh)
                put(f, col, row, wall_rgb);
            else
                put(f, col, row, pal.floor);
        }
    }
}

// Paints an axis-aligned blob centered at (col_center,row_center) with the
// given half extents, clipped to the frame.
void draw_blob(Frame& f, double col_center, double row_center, double half_w,
               double half_h, const double rgb[3]) {
    const int c0 = std::max(0, static_cast<int>(std::ceil(col_center - half_w - 0.5)));
    const int c1 = std::min(f.width - 1, static_cast<int>(std::floor(col_center + half_w - 0.5)));
    const int r0 = std::max(0, static_cast<int>(std::ceil(row_center - half_h - 0.5)));
    const int r1 = std::min(f.height - 1, static_cast<int>(std::floor(row_center + half_h - 0.5)));
    for (int row = r0; row <= r1; ++row)
        for (int col = c0; col <= c1; ++col) put(f, col, row, rgb);
}

// Bearing of a point relative to the agent: positive to the right, zero dead
// ahead. forward < 0 means the point is behind.
struct Bearing {
    double angle;
    double forward;
    double dist;
};

Bearing bearing_to(double ax, double ay, double heading, double tx, double ty) {
    const double vx = tx - ax;
    const double vy = ty - ay;
    const double fwd = vx * std::sin(heading) + vy * std::cos(heading);
    const double lat = vx * std::cos(heading) - vy * std::sin(heading);
    return {std::atan2(lat, fwd), fwd, std::hypot(vx, vy)};
}

}  // namespace

Scenario scenario_from_string(const std::string& name) {
    if (name == "shooter") return Scenario::shooter;
    if (name == "gather") return Scenario::gather;
    throw ConfigError("unknown scenario '" + name + "' (expected 'shooter' or 'gather')");
}

std::string to_string(Scenario s) {
    return s == Scenario::shooter ? "shooter" : "gather";
}

void EnvConfig::validate() const {
    if (width < 8 || height < 8) throw ConfigError("frame size must be at least 8x8");
    if (channels != 1 && channels != 3) throw ConfigError("channels must be 1 or 3");
    if (skip_frames < 1) throw ConfigError("skip_frames must be >= 1");
    if (stack < 1) throw ConfigError("stack must be >= 1");
    if (timeout < 0) throw ConfigError("timeout must be >= 0");
}

Env::Env(const EnvConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

int Env::timeout_ticks() const {
    if (cfg_.timeout > 0) return cfg_.timeout;
    return action_count() == 8 ? 300 : 2100;
}

State Env::reset(std::uint64_t episode_seed) {
    Rng rng(derive_seed(cfg_.seed, episode_seed));
    ticks_ = 0;
    terminal_ = false;
    started_ = true;
    reset_entities(rng);
    stack_.clear();
    const Frame first = render();
    for (int k = 0; k < cfg_.stack; ++k) stack_.push_back(first);
    return current_state();
}

StepResult Env::step(int action) { return step_with_skip(action, cfg_.skip_frames); }

StepResult Env::step_with_skip(int action, int n_ticks) {
    if (!started_) throw StateError("environment must be reset before stepping");
    if (terminal_) throw StateError("episode is finished; call reset");
    if (action < 0 || action >= action_count())
        throw ConfigError("action index " + std::to_string(action) + " out of range");
    if (n_ticks < 0) throw ConfigError("tick count must be >= 0");

    double reward = 0.0;
    for (int i = 0; i < n_ticks && !terminal_; ++i) {
        reward += tick(action);
        ++ticks_;
        if (!terminal_ && ticks_ >= timeout_ticks()) finish();
    }
    push_frame(render());
    return {current_state(), reward, terminal_};
}

void Env::push_frame(Frame f) {
    stack_.erase(stack_.begin());
    stack_.push_back(std::move(f));
}

State Env::current_state() const {
    State s;
    s.frames = stack_;
    return s;
}

std::unique_ptr<Env> make_env(Scenario scenario, const EnvConfig& cfg) {
    if (scenario == Scenario::shooter) return std::make_unique<ShooterEnv>(cfg);
    return std::make_unique<GatherEnv>(cfg);
}

// ---- shooter ----

void ShooterEnv::reset_entities(Rng& episode_rng) {
    agent_x_ = 0.5;  // fixed spawn every episode
    agent_y_ = 0.15;
    heading_ = 0.0;
    target_x_ = uniform_in(episode_rng, 0.12, 0.88);
    target_y_ = 0.85;
    cooldown_ = 0;
}

double ShooterEnv::target_bearing() const {
    return bearing_to(agent_x_, agent_y_, heading_, target_x_, target_y_).angle;
}

double ShooterEnv::target_distance() const {
    return std::hypot(target_x_ - agent_x_, target_y_ - agent_y_);
}

bool ShooterEnv::shot_hits() const {
    const Bearing b = bearing_to(agent_x_, agent_y_, heading_, target_x_, target_y_);
    if (b.forward <= 0.0 || b.dist < 1e-9) return false;
    return std::abs(b.angle) <= std::atan(kTargetRadius / b.dist);
}

double ShooterEnv::tick(int action) {
    double reward = -1.0;  // per-tick living cost
    const double fx = std::sin(heading_);
    const double fy = std::cos(heading_);
    auto move = [&](double dx, double dy) {
        agent_x_ = std::clamp(agent_x_ + dx, kWallMargin, 1.0 - kWallMargin);
        agent_y_ = std::clamp(agent_y_ + dy, kWallMargin, 1.0 - kWallMargin);
    };
    if (cooldown_ > 0) --cooldown_;
    switch (action) {
        case 0: move(kStrafeStep * fy, -kStrafeStep * fx); break;  // move right
        case 1: move(-kStrafeStep * fy, kStrafeStep * fx); break;  // move left
        case 2:
            if (cooldown_ == 0) {  // the weapon fires once per cooldown window
                cooldown_ = kShotCooldownTicks;
                if (shot_hits()) {
                    reward += 101.0;
                    finish();
                } else {
                    reward += -5.0;
                }
            }
            break;
        case 3: heading_ = wrap_angle(heading_ - kShooterTurn); break;  // turn left
        case 4: heading_ = wrap_angle(heading_ + kShooterTurn); break;  // turn right
        case 5: move(kMoveStep * fx, kMoveStep * fy); break;   // forward
        case 6: move(-kMoveStep * fx, -kMoveStep * fy); break;  // backward
        case 7: break;  // no-op
        default: break;
    }
    return reward;
}

Frame ShooterEnv::render() const {
    Frame f(cfg_.width, cfg_.height, cfg_.channels);
    render_room(f, kShooterPalette, agent_x_, agent_y_, heading_);

    const Bearing b = bearing_to(agent_x_, agent_y_, heading_, target_x_, target_y_);
    if (b.forward > 1e-9) {
        const double ar = std::atan(kTargetRadius / b.dist);
        if (std::abs(b.angle) < kFov / 2.0 + ar) {
            const double col_center = (0.5 + b.angle / kFov) * cfg_.width;
            const double half_w = std::max(ar / kFov * cfg_.width, 0.55);
            const double half_h =
                std::clamp(kTargetScale * cfg_.height / b.dist, 0.55, cfg_.height / 2.0);
            const double rgb[3] = {0.08, 0.06, 0.06};
            draw_blob(f, col_center, cfg_.height / 2.0, half_w, half_h, rgb);
        }
    }
    return f;
}

// ---- gather ----

void GatherEnv::reset_entities(Rng& episode_rng) {
    agent_x_ = 0.5;  // middle of the room
    agent_y_ = 0.5;
    heading_ = uniform_in(episode_rng, -kPi, kPi);
    life_ = kLifeMax;
    pack_rng_ = Rng(episode_rng());
    packs_.assign(kPackCount, {0.0, 0.0});
    for (std::size_t i = 0; i < packs_.size(); ++i) respawn_pack(i);
}

void GatherEnv::respawn_pack(std::size_t idx) {
    // keep a minimum clearance so a respawn cannot be collected for free
    for (;;) {
        const double x = uniform_in(pack_rng_, 0.08, 0.92);
        const double y = uniform_in(pack_rng_, 0.08, 0.92);
        if (std::hypot(x - agent_x_, y - agent_y_) >= 0.15) {
            packs_[idx] = {x, y};
            return;
        }
    }
}

double GatherEnv::tick(int action) {
    const int life_before = life_;
    const double fx = std::sin(heading_);
    const double fy = std::cos(heading_);
    auto move = [&](double dx, double dy) {
        agent_x_ = std::clamp(agent_x_ + dx, kWallMargin, 1.0 - kWallMargin);
        agent_y_ = std::clamp(agent_y_ + dy, kWallMargin, 1.0 - kWallMargin);
    };
    switch (action) {
        case 0: move(kGatherMove * fx, kGatherMove * fy); break;
        case 1: move(-kGatherMove * fx, -kGatherMove * fy); break;
        case 2: heading_ = wrap_angle(heading_ - kGatherTurn); break;
        case 3: heading_ = wrap_angle(heading_ + kGatherTurn); break;
        case 4: break;  // no-op
        default: break;
    }
    life_ -= kLifeDecayPerTick;
    if (life_ <= 0) {
        life_ = 0;
        finish();
    } else {
        for (std::size_t i = 0; i < packs_.size(); ++i) {
            if (std::hypot(packs_[i].first - agent_x_, packs_[i].second - agent_y_) <=
                kPickupRadius) {
                life_ = std::min(kLifeMax, life_ + kLifePerPack);
                respawn_pack(i);
            }
        }
    }
    return static_cast<double>(life_ - life_before);
}

Frame GatherEnv::render() const {
    Frame f(cfg_.width, cfg_.height, cfg_.channels);
    render_room(f, kGatherPalette, agent_x_, agent_y_, heading_);

    // far packs first so nearer ones overdraw them
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(packs_.size());
    for (std::size_t i = 0; i < packs_.size(); ++i) {
        const Bearing b =
            bearing_to(agent_x_, agent_y_, heading_, packs_[i].first, packs_[i].second);
        if (b.forward > 1e-9) order.emplace_back(b.dist, i);
    }
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    for (const auto& [dist, i] : order) {
        const Bearing b =
            bearing_to(agent_x_, agent_y_, heading_, packs_[i].first, packs_[i].second);
        const double ar = std::atan(kPackVisualRadius / b.dist);
        if (std::abs(b.angle) >= kFov / 2.0 + ar) continue;
        const double col_center = (0.5 + b.angle / kFov) * cfg_.width;
        const double half_w = std::max(ar / kFov * cfg_.width, 0.55);
        const double half_h =
            std::clamp(kPackScale * cfg_.height / b.dist, 0.55, cfg_.height / 4.0);
        const double row_center =
            std::min(cfg_.height - 1.0, cfg_.height / 2.0 + kFloorDrop * cfg_.height / b.dist);
        const double rgb[3] = {0.12, 0.95, 0.18};
        draw_blob(f, col_center, row_center, half_w, half_h, rgb);
    }
    return f;
}

// ---- trajectory log ----

TrajectoryLog::TrajectoryLog(const std::string& path) : path_(path) {
    buffer_ = "episode,tick,action,reward,terminal,status\n";
}

void TrajectoryLog::row(int episode, int tick, int action, double reward, bool terminal,
                        double status) {
    char line[160];
    std::snprintf(line, sizeof line, "%d,%d,%d,%.17g,%d,%.17g\n", episode, tick, action,
                  reward, terminal ? 1 : 0, status);
    buffer_ += line;
}

void TrajectoryLog::close() {
    std::ofstream out(path_);
    if (!out) throw IoError("cannot write trajectory log: " + path_);
    out << buffer_;
    if (!out.flush()) throw IoError("trajectory log write failed: " + path_);
}

}  // namespace vrbq
