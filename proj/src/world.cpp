#include "unfog/world.hpp"

#include <algorithm>
#include <cmath>

#include "unfog/rng.hpp"

namespace unfog {

namespace {

enum StreamKey : std::uint64_t {
    kStreamInit = 1,
    kStreamWaypoint = 2,
    kStreamBall = 3,
    kStreamMode = 4,
};

/// Role anchor in left-team coordinates plus how strongly the role shifts
/// with the ball. A player's home is anchor + ball_pull * (ball - anchor),
/// which keeps each slot in a recognizable zone that tracks play — the
/// structure that makes an unseen player's position partially inferable from
/// fresher observations, as it is in real positional play.
struct Role {
    Vec2 anchor;
    double ball_pull;
};

const std::array<Role, kPlayersPerTeam> kFormation = {{
    {{-48.0, 0.0}, 0.05},    // goalkeeper
    {{-34.0, -16.0}, 0.22},  // back four
    {{-36.0, -5.5}, 0.22},
    {{-36.0, 5.5}, 0.22},
    {{-34.0, 16.0}, 0.22},
    {{-18.0, -13.0}, 0.42},  // midfield four
    {{-20.0, -4.5}, 0.42},
    {{-20.0, 4.5}, 0.42},
    {{-18.0, 13.0}, 0.42},
    {{-6.0, -7.0}, 0.58},    // forwards
    {{-6.0, 7.0}, 0.58},
}};

/// Waypoints scatter around the role home by this much.
constexpr double kWaypointJitterX = 4.0;
constexpr double kWaypointJitterY = 3.0;

Vec2 role_home(int slot, bool left_team, const Vec2& ball) {
    const Role& role = kFormation[static_cast<std::size_t>(slot)];
    Vec2 anchor = role.anchor;
    if (!left_team) anchor.x = -anchor.x;
    return anchor + (ball - anchor) * role.ball_pull;
}

}  // namespace

PlayerState step_player(const PlayerState& state, const Vec2& waypoint,
                        double cruise_speed, const MotionParams& motion) {
    PlayerState next = state;
    const Vec2 to_target = waypoint - state.position;
    const double remaining = to_target.norm();
    if (remaining < 1e-9) {
        next.velocity = {0.0, 0.0};
        return next;
    }
    const double desired = bearing(state.position, waypoint);
    const double turn = std::clamp(wrap_angle(desired - state.body_deg),
                                   -motion.player_max_turn_deg,
                                   motion.player_max_turn_deg);
    next.body_deg = wrap_angle(state.body_deg + turn);
    const double speed =
        std::min({cruise_speed, remaining, motion.player_max_speed});
    const Vec2 previous = state.position;
    next.position = field::clamp(state.position + polar(speed, next.body_deg));
    next.velocity = next.position - previous;
    return next;
}

void step_ball(Vec2& position, Vec2& velocity, const MotionParams& motion) {
    velocity = velocity * motion.ball_decay;
    Vec2 p = position + velocity;
    if (p.x < -field::kHalfLength || p.x > field::kHalfLength) velocity.x = -velocity.x;
    if (p.y < -field::kHalfWidth || p.y > field::kHalfWidth) velocity.y = -velocity.y;
    position = field::clamp(p);
}

MatchEngine::MatchEngine(const MatchConfig& config)
    : config_(config),
      ball_rng_(seeded_rng(config.seed, {kStreamBall})),
      mode_rng_(seeded_rng(config.seed, {kStreamMode})) {
    auto init_rng = seeded_rng(config_.seed, {kStreamInit});
    snapshot_.cycle = 0;
    snapshot_.mode = GameMode::PlayOn;
    snapshot_.ball_position = {0.0, 0.0};
    snapshot_.ball_velocity = {0.0, 0.0};

    for (int i = 0; i < 2 * kPlayersPerTeam; ++i) {
        PlayerState& p = player(i);
        // Everyone starts loosely around their role home.
        const Vec2 home = role_home(i % kPlayersPerTeam, i < kPlayersPerTeam,
                                    snapshot_.ball_position);
        p.position = field::clamp({home.x + uniform_real(init_rng, -8.0, 8.0),
                                   home.y + uniform_real(init_rng, -6.0, 6.0)});
        p.velocity = {0.0, 0.0};
        p.body_deg = bearing(p.position, {0.0, 0.0});

        Wanderer& w = wanderers_[static_cast<std::size_t>(i)];
        w.rng = seeded_rng(config_.seed, {kStreamWaypoint, static_cast<std::uint64_t>(i)});
        w.cruise_speed = uniform_real(w.rng, 0.5, 0.95);
        refresh_waypoint(i);
    }
}

PlayerState& MatchEngine::player(int index) {
    return index < kPlayersPerTeam
               ? snapshot_.left[static_cast<std::size_t>(index)]
               : snapshot_.right[static_cast<std::size_t>(index - kPlayersPerTeam)];
}

void MatchEngine::refresh_waypoint(int index) {
    Wanderer& w = wanderers_[static_cast<std::size_t>(index)];
    const Vec2 home = role_home(index % kPlayersPerTeam, index < kPlayersPerTeam,
                                snapshot_.ball_position);
    const double margin = config_.motion.waypoint_margin;
    w.waypoint = {std::clamp(home.x + uniform_real(w.rng, -kWaypointJitterX, kWaypointJitterX),
                             -field::kHalfLength + margin, field::kHalfLength - margin),
                  std::clamp(home.y + uniform_real(w.rng, -kWaypointJitterY, kWaypointJitterY),
                             -field::kHalfWidth + margin, field::kHalfWidth - margin)};
    w.cycles_left = static_cast<int>(
        uniform_int(w.rng, config_.motion.waypoint_cycles_min,
                    config_.motion.waypoint_cycles_max));
}

void MatchEngine::maybe_kick() {
    // Nearest player kicks when the ball is in reach and has slowed down.
    int nearest = 0;
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i < 2 * kPlayersPerTeam; ++i) {
        const double d = dist(player(i).position, snapshot_.ball_position);
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    if (best > config_.motion.kickable_distance) return;
    if (snapshot_.ball_velocity.norm() > 0.6) return;
    if (uniform_real(ball_rng_, 0.0, 1.0) > 0.5) return;

    Vec2 target;
    if (uniform_real(ball_rng_, 0.0, 1.0) < 0.2) {
        // Shoot at the opposing goal.
        const bool left_team = nearest < kPlayersPerTeam;
        target = {left_team ? field::kHalfLength : -field::kHalfLength,
                  uniform_real(ball_rng_, -7.0, 7.0)};
    } else {
        const int base = nearest < kPlayersPerTeam ? 0 : kPlayersPerTeam;
        int mate = nearest;
        while (mate == nearest) {
            mate = base + static_cast<int>(uniform_int(ball_rng_, 0, kPlayersPerTeam - 1));
        }
        target = player(mate).position;
    }
    const double speed = uniform_real(ball_rng_, 1.2, config_.motion.ball_max_speed);
    const double dir = bearing(snapshot_.ball_position, target);
    snapshot_.ball_velocity = polar(std::min(speed, config_.motion.ball_max_speed), dir);
}

void MatchEngine::update_mode() {
    if (break_cycles_left_ > 0) {
        --break_cycles_left_;
        snapshot_.mode = break_cycles_left_ > 0 ? GameMode::Other : GameMode::PlayOn;
        return;
    }
    if (uniform_real(mode_rng_, 0.0, 1.0) < config_.motion.break_start_chance) {
        break_cycles_left_ = static_cast<int>(
            uniform_int(mode_rng_, config_.motion.break_cycles_min,
                        config_.motion.break_cycles_max));
        snapshot_.mode = GameMode::Other;
    } else {
        snapshot_.mode = GameMode::PlayOn;
    }
}

void MatchEngine::step() {
    // One chaser per team keeps the ball in play.
    int chaser[2] = {0, kPlayersPerTeam};
    double chaser_dist[2] = {std::numeric_limits<double>::max(),
                             std::numeric_limits<double>::max()};
    for (int i = 0; i < 2 * kPlayersPerTeam; ++i) {
        const int team = i < kPlayersPerTeam ? 0 : 1;
        const double d = dist(player(i).position, snapshot_.ball_position);
        if (d < chaser_dist[team]) {
            chaser_dist[team] = d;
            chaser[team] = i;
        }
    }
    for (int i = 0; i < 2 * kPlayersPerTeam; ++i) {
        Wanderer& w = wanderers_[static_cast<std::size_t>(i)];
        if (--w.cycles_left <= 0) refresh_waypoint(i);
        const bool chasing = i == chaser[0] || i == chaser[1];
        const Vec2 target = chasing ? snapshot_.ball_position : w.waypoint;
        player(i) = step_player(player(i), target, w.cruise_speed, config_.motion);
    }
    step_ball(snapshot_.ball_position, snapshot_.ball_velocity, config_.motion);
    maybe_kick();
    update_mode();
    ++snapshot_.cycle;
}

}  // namespace unfog
