#pragma once

#include <cmath>
#include <stdexcept>

namespace unfog {

/// 2D vector in field coordinates: x toward the right goal, y upward,
/// angles in degrees counterclockwise from +x.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
};

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

constexpr double kDegPerRad = 57.29577951308232;

/// Wraps an angle to [-180, 180). Non-finite input is a domain error.
inline double wrap_angle(double deg) {
    if (!std::isfinite(deg)) {
        throw std::domain_error("wrap_angle: non-finite angle");
    }
    double a = std::fmod(deg + 180.0, 360.0);
    if (a < 0.0) a += 360.0;
    return a - 180.0;
}

/// Unit-length displacement scaled by r, at `deg` degrees from +x.
inline Vec2 polar(double r, double deg) {
    const double rad = deg / kDegPerRad;
    return {r * std::cos(rad), r * std::sin(rad)};
}

/// Direction of the vector from `from` to `to`, in [-180, 180).
inline double bearing(const Vec2& from, const Vec2& to) {
    const Vec2 d = to - from;
    if (d.x == 0.0 && d.y == 0.0) return 0.0;
    return wrap_angle(std::atan2(d.y, d.x) * kDegPerRad);
}

namespace field {

constexpr double kHalfLength = 52.5;  // |x| bound
constexpr double kHalfWidth = 34.0;   // |y| bound

/// Placeholder position for objects the observer has forgotten.
constexpr double kSentinelX = -105.0;
constexpr double kSentinelY = -68.0;

inline Vec2 sentinel() { return {kSentinelX, kSentinelY}; }

inline bool contains(const Vec2& p) {
    return p.x >= -kHalfLength && p.x <= kHalfLength &&
           p.y >= -kHalfWidth && p.y <= kHalfWidth;
}

inline Vec2 clamp(const Vec2& p, double margin = 0.0) {
    auto clip = [](double v, double lo, double hi) {
        return v < lo ? lo : (v > hi ? hi : v);
    };
    return {clip(p.x, -kHalfLength - margin, kHalfLength + margin),
            clip(p.y, -kHalfWidth - margin, kHalfWidth + margin)};
}

}  // namespace field

}  // namespace unfog
