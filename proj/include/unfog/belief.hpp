#pragma once

#include <array>
#include <cstdint>

#include "unfog/world.hpp"

namespace unfog {

constexpr int kMaxPosCount = 30;

/// One tracked object. pos_count is the number of cycles since the last
/// sighting; it reaches kMaxPosCount when the object is forgotten, at which
/// point the position is the off-field sentinel and known becomes false.
struct ObjectBelief {
    Vec2 position = field::sentinel();
    Vec2 velocity;
    double body_deg = 0.0;
    int pos_count = kMaxPosCount;
    bool known = false;
};

/// Everything one observer believes about the field at one cycle.
struct BeliefState {
    std::int64_t cycle = -1;
    Vec2 self_estimate = field::sentinel();
    bool localized = false;      // did self-localization succeed this cycle
    bool self_known = false;     // has it ever succeeded
    ObjectBelief ball;
    std::array<ObjectBelief, kPlayersPerTeam> left;
    std::array<ObjectBelief, kPlayersPerTeam> right;
};

/// Neck direction for the given cycle. RotatingScan sweeps 60 degrees per
/// cycle so a 60-degree cone tiles the full circle every six cycles;
/// BallFocused points at the believed ball position and falls back to the
/// rotating scan while the ball is unknown.
double neck_direction(const BeliefState& belief, std::int64_t cycle,
                      const Vec2& observer_true_pos, NeckPolicy policy);

/// Advances the observer's belief from `truth.cycle - 1` to `truth.cycle`.
///
/// The observer is right-team player `observer_unum`. It first localizes
/// itself from the three closest visible flags; on failure every pos_count
/// increments and nothing else changes. Otherwise each object in the view
/// cone is re-estimated from its quantized distance and rounded direction,
/// with velocity taken as the delta of the two estimates when the object was
/// also seen the previous cycle. Objects out of view age by one cycle and are
/// forgotten at kMaxPosCount.
BeliefState update_belief(const BeliefState& belief, const WorldSnapshot& truth,
                          const ViewConfig& view, int observer_unum);

/// A full (truth, belief) trajectory for one synthesized match.
struct MatchTrace {
    std::uint64_t seed = 0;
    int match_id = 0;
    int observer_unum = 9;
    ViewConfig view;
    std::vector<WorldSnapshot> truth;
    std::vector<BeliefState> belief;
};

/// Runs a match to completion: one (snapshot, belief) pair per cycle,
/// deterministic in (config, match_id).
MatchTrace run_match(const MatchConfig& config, int match_id);

}  // namespace unfog
