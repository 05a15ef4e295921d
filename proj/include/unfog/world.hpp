#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "unfog/geometry.hpp"
#include "unfog/sensor.hpp"

namespace unfog {

enum class GameMode : std::uint8_t { PlayOn = 0, Other = 1 };

constexpr int kPlayersPerTeam = 11;

struct PlayerState {
    Vec2 position;
    Vec2 velocity;       // displacement per cycle
    double body_deg = 0; // heading, wrapped to [-180, 180)
};

struct WorldSnapshot {
    std::int64_t cycle = 0;
    Vec2 ball_position;
    Vec2 ball_velocity;
    std::array<PlayerState, kPlayersPerTeam> left;
    std::array<PlayerState, kPlayersPerTeam> right;
    GameMode mode = GameMode::PlayOn;
};

struct MotionParams {
    double player_max_speed = 1.05;
    double player_max_turn_deg = 30.0;
    double ball_max_speed = 3.0;
    double ball_decay = 0.94;
    double kickable_distance = 1.085;
    double waypoint_margin = 2.5;      // waypoints stay this far inside the lines
    int waypoint_cycles_min = 20;
    int waypoint_cycles_max = 50;
    double break_start_chance = 0.005; // per PlayOn cycle, ~every 200 cycles
    int break_cycles_min = 5;
    int break_cycles_max = 20;
};

struct MatchConfig {
    int cycles = 6000;
    ViewConfig view;
    std::uint64_t seed = 1;
    int observer_unum = 9;  // right-team shirt number of the observing player
    MotionParams motion;
};

/// Player advanced one cycle toward `waypoint`: heading turns by at most
/// max_turn_deg, speed is min(cruise_speed, remaining distance) capped at
/// player_max_speed, and the position is clamped to the field.
PlayerState step_player(const PlayerState& state, const Vec2& waypoint,
                        double cruise_speed, const MotionParams& motion);

/// Ball advanced one cycle: velocity decays by ball_decay, position moves by
/// the decayed velocity and bounces off the field boundary.
void step_ball(Vec2& position, Vec2& velocity, const MotionParams& motion);

/// Synthesizes one match deterministically from its seed. Each player holds a
/// formation role whose home position shifts with the ball; waypoints are
/// resampled around that home every few dozen cycles, so positions stay
/// role-structured and partially inferable from the rest of the play. The
/// nearest player per team chases and kicks the ball toward a teammate or a
/// goal; PlayOn is interrupted by short Other-mode breaks.
class MatchEngine {
public:
    explicit MatchEngine(const MatchConfig& config);

    const WorldSnapshot& snapshot() const { return snapshot_; }
    const MatchConfig& config() const { return config_; }

    /// Advances the world by one cycle.
    void step();

private:
    struct Wanderer {
        Vec2 waypoint;
        double cruise_speed = 0.8;
        int cycles_left = 0;
        std::mt19937_64 rng;
    };

    PlayerState& player(int index);  // 0..21: left 0..10, right 11..21
    void refresh_waypoint(int index);
    void maybe_kick();
    void update_mode();

    MatchConfig config_;
    WorldSnapshot snapshot_;
    std::array<Wanderer, 2 * kPlayersPerTeam> wanderers_;
    std::mt19937_64 ball_rng_;
    std::mt19937_64 mode_rng_;
    int break_cycles_left_ = 0;
};

}  // namespace unfog
