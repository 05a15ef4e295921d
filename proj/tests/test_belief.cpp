#include "doctest.h"

#include <cmath>

#include "unfog/belief.hpp"

using namespace unfog;

namespace {

MatchConfig small_config(std::uint64_t seed, int cycles = 600) {
    MatchConfig config;
    config.cycles = cycles;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("neck direction policies") {
    BeliefState belief;
    CHECK(neck_direction(belief, 0, {0, 0}, NeckPolicy::RotatingScan) == 0.0);
    CHECK(neck_direction(belief, 1, {0, 0}, NeckPolicy::RotatingScan) == 60.0);
    CHECK(neck_direction(belief, 3, {0, 0}, NeckPolicy::RotatingScan) == -180.0);
    CHECK(neck_direction(belief, 6, {0, 0}, NeckPolicy::RotatingScan) == 0.0);

    // Ball focus falls back to the scan until both ball and self are known.
    CHECK(neck_direction(belief, 1, {0, 0}, NeckPolicy::BallFocused) == 60.0);
    belief.ball.known = true;
    belief.ball.position = {10.0, 10.0};
    belief.self_known = true;
    CHECK(neck_direction(belief, 1, {0, 0}, NeckPolicy::BallFocused) == doctest::Approx(45.0));
}

TEST_CASE("update_belief rejects out-of-order cycles") {
    BeliefState belief;
    belief.cycle = 5;
    WorldSnapshot truth;
    truth.cycle = 5;  // must be belief.cycle + 1
    ViewConfig view;
    CHECK_THROWS_AS(update_belief(belief, truth, view, 9), std::invalid_argument);
}

TEST_CASE("localization failure ages every object and places nothing") {
    // Observer just inside the right goal line, neck pointing out of the
    // field (cycle 0 scan direction is 0 degrees): no flag falls inside the
    // 60-degree cone, so there is no position fix this cycle.
    WorldSnapshot truth;
    truth.cycle = 0;
    truth.right[8].position = {52.4, 0.0};
    truth.ball_position = {40.0, 0.0};

    BeliefState prev;
    prev.cycle = -1;
    prev.ball.position = {39.0, 0.0};
    prev.ball.velocity = {1.0, 0.0};
    prev.ball.pos_count = 2;
    prev.ball.known = true;

    ViewConfig view;
    const BeliefState next = update_belief(prev, truth, view, 9);
    CHECK_FALSE(next.localized);
    CHECK_FALSE(next.self_known);
    CHECK(next.ball.pos_count == 3);
    CHECK(next.ball.known);
    CHECK(next.ball.position.x == 39.0);  // untouched, just older
    CHECK(next.right[8].pos_count == kMaxPosCount);  // self entry unknown too
}

TEST_CASE("pos_count matches an independent sighting log over a whole match") {
    const MatchConfig config = small_config(11);
    const MatchTrace trace = run_match(config, 0);
    REQUIRE(trace.truth.size() == 600);
    REQUIRE(trace.belief.size() == 600);

    // Independent replay of the aging law: a counter per object that resets
    // on "localized and inside the view cone at the true position", ages
    // otherwise, and saturates at kMaxPosCount (forgotten).
    struct Counter {
        int age = kMaxPosCount;
    };
    Counter ball;
    std::array<Counter, kPlayersPerTeam> left, right;
    auto aged = [](Counter& c) { c.age = std::min(c.age + 1, kMaxPosCount); };

    for (std::size_t cy = 0; cy < trace.truth.size(); ++cy) {
        const WorldSnapshot& truth = trace.truth[cy];
        const BeliefState& now = trace.belief[cy];
        const BeliefState* prev = cy ? &trace.belief[cy - 1] : nullptr;

        const Vec2 observer = truth.right[8].position;
        BeliefState fallback;
        const double neck = neck_direction(prev ? *prev : fallback, truth.cycle, observer,
                                           trace.view.neck_policy);

        if (!now.localized) {
            aged(ball);
            for (auto& c : left) aged(c);
            for (auto& c : right) aged(c);
        } else {
            auto update = [&](Counter& c, const Vec2& pos) {
                if (in_view(observer, neck, pos, trace.view)) c.age = 0;
                else aged(c);
            };
            update(ball, truth.ball_position);
            for (int i = 0; i < kPlayersPerTeam; ++i) {
                update(left[i], truth.left[i].position);
                if (i != 8) update(right[i], truth.right[i].position);
            }
            right[8].age = 0;  // the observer always knows itself once localized
        }

        CHECK(now.ball.pos_count == ball.age);
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            CHECK(now.left[i].pos_count == left[i].age);
            CHECK(now.right[i].pos_count == right[i].age);
        }
    }
}

TEST_CASE("sighted objects are reconstructed by the documented formula") {
    const MatchConfig config = small_config(23, 400);
    const MatchTrace trace = run_match(config, 1);

    int checked = 0;
    for (std::size_t cy = 1; cy < trace.truth.size(); ++cy) {
        const WorldSnapshot& truth = trace.truth[cy];
        const BeliefState& now = trace.belief[cy];
        if (!now.localized) continue;
        const Vec2 observer = truth.right[8].position;
        const double neck = neck_direction(trace.belief[cy - 1], truth.cycle, observer,
                                           trace.view.neck_policy);
        const int neck_estimate = observe_direction(neck);

        for (int i = 0; i < kPlayersPerTeam; ++i) {
            if (now.left[i].pos_count != 0) continue;
            const Vec2 true_pos = truth.left[i].position;
            const double obs_dist =
                observe_distance(std::max(dist(observer, true_pos), 1e-9), kObjectDistStep);
            const int rel_dir =
                observe_direction(wrap_angle(bearing(observer, true_pos) - neck));
            const Vec2 expect = field::clamp(
                now.self_estimate + polar(obs_dist, wrap_angle(double(rel_dir + neck_estimate))));
            CHECK(dist(now.left[i].position, expect) < 1e-9);
            ++checked;
        }
    }
    CHECK(checked > 200);  // the oracle must actually have fired
}

TEST_CASE("velocity estimates come from consecutive sightings and stay clamped") {
    // The 120-degree cone overlaps the 60-degree scan step, so objects are
    // regularly sighted in consecutive cycles.
    MatchConfig config = small_config(31, 500);
    config.view.width_deg = 120.0;
    const MatchTrace trace = run_match(config, 2);

    int consecutive = 0;
    for (std::size_t cy = 1; cy < trace.belief.size(); ++cy) {
        const BeliefState& prev = trace.belief[cy - 1];
        const BeliefState& now = trace.belief[cy];
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            const auto& b = now.left[i];
            CHECK(std::fabs(b.velocity.x) <= 3.0);
            CHECK(std::fabs(b.velocity.y) <= 3.0);
            if (b.pos_count == 0 && prev.left[i].pos_count == 0 && prev.left[i].known) {
                const Vec2 delta = b.position - prev.left[i].position;
                if (std::fabs(delta.x) <= 3.0 && std::fabs(delta.y) <= 3.0) {
                    CHECK(b.velocity.x == doctest::Approx(delta.x).epsilon(1e-12));
                    CHECK(b.velocity.y == doctest::Approx(delta.y).epsilon(1e-12));
                    ++consecutive;
                }
            }
        }
    }
    CHECK(consecutive > 100);
}

TEST_CASE("forgotten objects sit at the sentinel with no velocity") {
    // A long match against a distant opponent guarantees saturation somewhere.
    const MatchConfig config = small_config(5, 1500);
    const MatchTrace trace = run_match(config, 3);

    int forgotten_seen = 0;
    for (const BeliefState& b : trace.belief) {
        for (const auto& team : {b.left, b.right}) {
            for (const auto& obj : team) {
                if (obj.pos_count >= kMaxPosCount) {
                    ++forgotten_seen;
                    CHECK_FALSE(obj.known);
                    CHECK(obj.position.x == field::kSentinelX);
                    CHECK(obj.position.y == field::kSentinelY);
                    CHECK(obj.velocity.x == 0.0);
                    CHECK(obj.velocity.y == 0.0);
                }
                CHECK(obj.pos_count <= kMaxPosCount);
                if (obj.known) CHECK(field::contains(obj.position));
            }
        }
    }
    CHECK(forgotten_seen > 0);
}

TEST_CASE("run_match is deterministic and distinct per match id") {
    const MatchConfig config = small_config(77, 120);
    const MatchTrace a = run_match(config, 4);
    const MatchTrace b = run_match(config, 4);
    const MatchTrace c = run_match(config, 5);

    bool any_diff = false;
    for (std::size_t cy = 0; cy < a.truth.size(); ++cy) {
        CHECK(a.truth[cy].ball_position.x == b.truth[cy].ball_position.x);
        CHECK(a.belief[cy].self_estimate.x == b.belief[cy].self_estimate.x);
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            CHECK(a.belief[cy].left[i].position.x == b.belief[cy].left[i].position.x);
            CHECK(a.belief[cy].left[i].pos_count == b.belief[cy].left[i].pos_count);
        }
        if (a.truth[cy].ball_position.x != c.truth[cy].ball_position.x) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("self estimate stays close to the true observer position") {
    const MatchConfig config = small_config(13, 400);
    const MatchTrace trace = run_match(config, 6);
    int localized = 0;
    for (std::size_t cy = 0; cy < trace.belief.size(); ++cy) {
        const BeliefState& b = trace.belief[cy];
        if (!b.localized) continue;
        ++localized;
        CHECK(dist(b.self_estimate, trace.truth[cy].right[8].position) < 1.0);
    }
    CHECK(localized > 300);  // the rotating scan finds flags most cycles
}
