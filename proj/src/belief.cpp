#include "unfog/belief.hpp"

#include <cmath>
#include <stdexcept>

#include "unfog/rng.hpp"

namespace unfog {

namespace {

constexpr double kMinObservableDistance = 1e-9;

double clamp_component(double v, double bound) {
    return v < -bound ? -bound : (v > bound ? bound : v);
}

ObjectBelief forgotten() {
    return ObjectBelief{};  // sentinel position, pos_count 30, known false
}

ObjectBelief aged(const ObjectBelief& prev) {
    ObjectBelief next = prev;
    next.pos_count = std::min(prev.pos_count + 1, kMaxPosCount);
    if (next.pos_count >= kMaxPosCount) return forgotten();
    return next;
}

/// Re-estimates one object from a fresh sighting.
ObjectBelief sight(const ObjectBelief& prev, const Vec2& self_estimate,
                   const Vec2& true_observer_pos, double true_neck,
                   int neck_estimate, const Vec2& true_pos, double true_body,
                   bool has_body) {
    ObjectBelief next;
    const double d = std::max(dist(true_observer_pos, true_pos), kMinObservableDistance);
    const double obs_dist = observe_distance(d, kObjectDistStep);
    const int rel_dir = observe_direction(
        wrap_angle(bearing(true_observer_pos, true_pos) - true_neck));
    const double global_dir = wrap_angle(static_cast<double>(rel_dir + neck_estimate));
    next.position = field::clamp(self_estimate + polar(obs_dist, global_dir));
    if (prev.known && prev.pos_count == 0) {
        // Seen in consecutive cycles: velocity from the estimate delta.
        const Vec2 delta = next.position - prev.position;
        next.velocity = {clamp_component(delta.x, 3.0), clamp_component(delta.y, 3.0)};
    } else {
        next.velocity = prev.known ? prev.velocity : Vec2{0.0, 0.0};
    }
    if (has_body) {
        next.body_deg = wrap_angle(static_cast<double>(
            observe_direction(wrap_angle(true_body - true_neck)) + neck_estimate));
    }
    next.pos_count = 0;
    next.known = true;
    return next;
}

}  // namespace

double neck_direction(const BeliefState& belief, std::int64_t cycle,
                      const Vec2& observer_true_pos, NeckPolicy policy) {
    if (policy == NeckPolicy::BallFocused && belief.ball.known && belief.self_known) {
        return bearing(observer_true_pos, belief.ball.position);
    }
    return wrap_angle(static_cast<double>(cycle) * 60.0);
}

BeliefState update_belief(const BeliefState& belief, const WorldSnapshot& truth,
                          const ViewConfig& view, int observer_unum) {
    if (belief.cycle != truth.cycle - 1) {
        throw std::invalid_argument("update_belief: belief must lag truth by one cycle");
    }
    const int obs_index = observer_unum - 1;
    const PlayerState& observer = truth.right[static_cast<std::size_t>(obs_index)];
    const double neck = neck_direction(belief, truth.cycle, observer.position,
                                       view.neck_policy);
    const int neck_estimate = observe_direction(neck);

    BeliefState next = belief;
    next.cycle = truth.cycle;

    // Self-localization from the three closest visible flags. Flags are fixed
    // landmarks and stay identifiable at any distance inside the cone.
    std::vector<FlagSighting> sightings;
    for (const Flag& f : flag_layout()) {
        if (!in_cone(observer.position, neck, f.position, view.width_deg)) continue;
        const double d = std::max(dist(observer.position, f.position),
                                  kMinObservableDistance);
        const int rel_dir = observe_direction(
            wrap_angle(bearing(observer.position, f.position) - neck));
        sightings.push_back({f.id, f.position, observe_distance(d, kFlagDistStep),
                             wrap_angle(static_cast<double>(rel_dir + neck_estimate))});
    }
    const auto self = localize_self(sightings);
    next.localized = self.has_value();
    if (!next.localized) {
        // Without a position fix nothing can be placed; everything ages.
        next.ball = aged(belief.ball);
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            next.left[static_cast<std::size_t>(i)] = aged(belief.left[static_cast<std::size_t>(i)]);
            next.right[static_cast<std::size_t>(i)] = aged(belief.right[static_cast<std::size_t>(i)]);
        }
        return next;
    }

    const Vec2 prev_self = next.self_estimate;
    const bool prev_localized = belief.localized && belief.self_known;
    next.self_estimate = field::clamp(*self);
    next.self_known = true;

    // The observer's own entry mirrors the self estimate.
    ObjectBelief& me = next.right[static_cast<std::size_t>(obs_index)];
    if (prev_localized) {
        const Vec2 delta = next.self_estimate - prev_self;
        me.velocity = {clamp_component(delta.x, 3.0), clamp_component(delta.y, 3.0)};
    } else {
        me.velocity = {0.0, 0.0};
    }
    me.position = next.self_estimate;
    me.body_deg = wrap_angle(static_cast<double>(observe_direction(observer.body_deg)));
    me.pos_count = 0;
    me.known = true;

    auto update_object = [&](const ObjectBelief& prev, const Vec2& true_pos,
                             double true_body, bool has_body) {
        if (in_view(observer.position, neck, true_pos, view)) {
            return sight(prev, next.self_estimate, observer.position, neck,
                         neck_estimate, true_pos, true_body, has_body);
        }
        return aged(prev);
    };

    next.ball = update_object(belief.ball, truth.ball_position, 0.0, false);
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        next.left[idx] = update_object(belief.left[idx], truth.left[idx].position,
                                       truth.left[idx].body_deg, true);
        if (i != obs_index) {
            next.right[idx] = update_object(belief.right[idx], truth.right[idx].position,
                                            truth.right[idx].body_deg, true);
        }
    }
    return next;
}

MatchTrace run_match(const MatchConfig& config, int match_id) {
    MatchConfig per_match = config;
    per_match.seed = mix64(config.seed ^ mix64(static_cast<std::uint64_t>(match_id) + 0x517cc1b727220a95ULL));

    MatchTrace trace;
    trace.seed = config.seed;
    trace.match_id = match_id;
    trace.observer_unum = config.observer_unum;
    trace.view = config.view;
    trace.truth.reserve(static_cast<std::size_t>(config.cycles));
    trace.belief.reserve(static_cast<std::size_t>(config.cycles));

    MatchEngine engine(per_match);
    BeliefState belief;
    belief.cycle = -1;
    for (int c = 0; c < config.cycles; ++c) {
        if (c > 0) engine.step();
        belief = update_belief(belief, engine.snapshot(), config.view,
                               config.observer_unum);
        trace.truth.push_back(engine.snapshot());
        trace.belief.push_back(belief);
    }
    return trace;
}

}  // namespace unfog
