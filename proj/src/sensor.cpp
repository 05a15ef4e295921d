#include "unfog/sensor.hpp"

#include <algorithm>
#include <cmath>

namespace unfog {

double quantize(double value, double step) {
    if (!std::isfinite(value)) {
        throw std::domain_error("quantize: non-finite value");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::domain_error("quantize: step must be positive");
    }
    // std::round breaks ties away from zero.
    return std::round(value / step) * step;
}

double observe_distance(double true_distance, double log_step) {
    if (!(true_distance > 0.0) || !std::isfinite(true_distance)) {
        throw std::domain_error("observe_distance: distance must be positive");
    }
    const double q = quantize(std::log(true_distance), log_step);
    return quantize(std::exp(q), 0.1);
}

int observe_direction(double relative_direction_deg) {
    const double wrapped = wrap_angle(relative_direction_deg);
    return static_cast<int>(wrap_angle(std::round(wrapped)));
}

bool in_cone(const Vec2& observer_pos, double observer_neck_deg,
             const Vec2& target_pos, double width_deg) {
    const double offset =
        wrap_angle(bearing(observer_pos, target_pos) - observer_neck_deg);
    return std::fabs(offset) <= width_deg * 0.5;
}

bool in_view(const Vec2& observer_pos, double observer_neck_deg,
             const Vec2& target_pos, const ViewConfig& view) {
    if (dist(observer_pos, target_pos) > view.max_visible_distance) return false;
    return in_cone(observer_pos, observer_neck_deg, target_pos, view.width_deg);
}

const std::vector<Flag>& flag_layout() {
    static const std::vector<Flag> flags = [] {
        std::vector<Flag> fs;
        int id = 0;
        auto add = [&](double x, double y) { fs.push_back({id++, {x, y}}); };
        // Corners.
        add(-field::kHalfLength, -field::kHalfWidth);
        add(-field::kHalfLength, field::kHalfWidth);
        add(field::kHalfLength, -field::kHalfWidth);
        add(field::kHalfLength, field::kHalfWidth);
        // Eight flags along each touch line (y = +-34).
        for (int i = 1; i <= 8; ++i) {
            const double x = -field::kHalfLength + i * (2.0 * field::kHalfLength / 9.0);
            add(x, -field::kHalfWidth);
            add(x, field::kHalfWidth);
        }
        // Four flags along each goal line (x = +-52.5).
        for (int j = 1; j <= 4; ++j) {
            const double y = -field::kHalfWidth + j * (2.0 * field::kHalfWidth / 5.0);
            add(-field::kHalfLength, y);
            add(field::kHalfLength, y);
        }
        // Goal posts (goal width 14.02).
        add(-field::kHalfLength, -7.01);
        add(-field::kHalfLength, 7.01);
        add(field::kHalfLength, -7.01);
        add(field::kHalfLength, 7.01);
        return fs;
    }();
    return flags;
}

std::optional<Vec2> localize_self(const std::vector<FlagSighting>& sightings) {
    if (sightings.size() < 3) return std::nullopt;
    std::vector<const FlagSighting*> sorted;
    sorted.reserve(sightings.size());
    for (const auto& s : sightings) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(),
              [](const FlagSighting* a, const FlagSighting* b) {
                  if (a->observed_distance != b->observed_distance) {
                      return a->observed_distance < b->observed_distance;
                  }
                  return a->flag_id < b->flag_id;
              });

    Vec2 sum;
    for (int k = 0; k < 3; ++k) {
        const FlagSighting& s = *sorted[k];
        sum += s.flag_position - polar(s.observed_distance, s.observed_global_dir_deg);
    }
    return Vec2{sum.x / 3.0, sum.y / 3.0};
}

}  // namespace unfog
