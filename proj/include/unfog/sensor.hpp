#pragma once

#include <optional>
#include <vector>

#include "unfog/geometry.hpp"

namespace unfog {

// Visual sensor model. All observation noise is deterministic: distances go
// through a quantization on the log scale (coarser with distance), directions
// are rounded to whole degrees. Self-localization triangulates off the three
// closest visible flags.

/// Nearest multiple of `step`, ties rounded away from zero.
double quantize(double value, double step);

/// Observed distance to an object at `true_distance`. `log_step` is the
/// quantization step on the log scale: 0.1 for players and the ball,
/// 0.01 for flags.
double observe_distance(double true_distance, double log_step);

constexpr double kObjectDistStep = 0.1;
constexpr double kFlagDistStep = 0.01;

/// Observed direction: whole degrees, ties away from zero, wrapped to
/// [-180, 180).
int observe_direction(double relative_direction_deg);

enum class NeckPolicy { RotatingScan, BallFocused };

struct ViewConfig {
    double width_deg = 60.0;  // one of 60, 120, 180
    double max_visible_distance = 60.0;  // players and ball; flags are exempt
    NeckPolicy neck_policy = NeckPolicy::RotatingScan;
};

/// True iff `target` falls inside the view cone: bearing within
/// width/2 of the neck direction (inclusive) and within visible range.
bool in_view(const Vec2& observer_pos, double observer_neck_deg,
             const Vec2& target_pos, const ViewConfig& view);

/// Cone check without the range limit, used for flags.
bool in_cone(const Vec2& observer_pos, double observer_neck_deg,
             const Vec2& target_pos, double width_deg);

struct Flag {
    int id = 0;
    Vec2 position;
};

/// The fixed landmark set: 28 flags around the field perimeter plus the
/// four goal posts. Constant across matches.
const std::vector<Flag>& flag_layout();

struct FlagSighting {
    int flag_id = 0;
    Vec2 flag_position;
    double observed_distance = 0.0;
    double observed_global_dir_deg = 0.0;  // relative observation + neck estimate
};

/// Position estimate from the three sightings with the smallest observed
/// distance: each one back-projects the flag by its observed polar offset,
/// and the three candidates are averaged. Fewer than three sightings means
/// localization failed for this cycle.
std::optional<Vec2> localize_self(const std::vector<FlagSighting>& sightings);

}  // namespace unfog
