#include "doctest.h"

#include "unfog/geometry.hpp"

using namespace unfog;

TEST_CASE("wrap_angle maps into [-180, 180)") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(180.0) == -180.0);
    CHECK(wrap_angle(-180.0) == -180.0);
    CHECK(wrap_angle(360.0) == 0.0);
    CHECK(wrap_angle(540.0) == -180.0);
    CHECK(wrap_angle(-540.0) == -180.0);
    CHECK(wrap_angle(190.0) == doctest::Approx(-170.0));
    CHECK(wrap_angle(-190.0) == doctest::Approx(170.0));
    CHECK(wrap_angle(719.5) == doctest::Approx(-0.5));

    for (double a = -1000.0; a <= 1000.0; a += 7.3) {
        const double w = wrap_angle(a);
        CHECK(w >= -180.0);
        CHECK(w < 180.0);
        // Same direction modulo a full turn.
        CHECK(std::fabs(std::remainder(w - a, 360.0)) < 1e-9);
    }

    CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_THROWS_AS(wrap_angle(std::nan("")), std::domain_error);
}

TEST_CASE("polar and bearing are inverses") {
    const Vec2 origin{3.0, -4.0};
    for (double deg = -179.0; deg < 180.0; deg += 13.7) {
        for (double r : {0.5, 2.0, 37.5}) {
            const Vec2 p = origin + polar(r, deg);
            CHECK(bearing(origin, p) == doctest::Approx(deg).epsilon(1e-9));
            CHECK(dist(origin, p) == doctest::Approx(r).epsilon(1e-12));
        }
    }
    CHECK(bearing({0, 0}, {1, 0}) == 0.0);
    CHECK(bearing({0, 0}, {0, 1}) == doctest::Approx(90.0));
    CHECK(bearing({0, 0}, {-1, 0}) == -180.0);
    CHECK(bearing({0, 0}, {0, 0}) == 0.0);  // degenerate: defined as 0
}

TEST_CASE("field bounds and clamping") {
    CHECK(field::contains({0, 0}));
    CHECK(field::contains({52.5, 34.0}));
    CHECK(field::contains({-52.5, -34.0}));
    CHECK_FALSE(field::contains({52.51, 0}));
    CHECK_FALSE(field::contains({0, -34.01}));
    CHECK_FALSE(field::contains(field::sentinel()));

    const Vec2 far{100.0, -100.0};
    const Vec2 c0 = field::clamp(far);
    CHECK(c0.x == 52.5);
    CHECK(c0.y == -34.0);
    // A margin extends the permitted box beyond the lines.
    const Vec2 c5 = field::clamp(far, 5.0);
    CHECK(c5.x == 57.5);
    CHECK(c5.y == -39.0);
    const Vec2 inside{10.0, 10.0};
    const Vec2 ci = field::clamp(inside, 5.0);
    CHECK(ci.x == inside.x);
    CHECK(ci.y == inside.y);
}
