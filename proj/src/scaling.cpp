#include "unfog/scaling.hpp"

#include <stdexcept>

#include "unfog/geometry.hpp"

namespace unfog {

namespace domains {

const FeatureDomain& position_x() {
    static const FeatureDomain d{"pos_x", -field::kHalfLength, field::kHalfLength, -1.0, 1.0};
    return d;
}

const FeatureDomain& position_y() {
    static const FeatureDomain d{"pos_y", -field::kHalfWidth, field::kHalfWidth, -1.0, 1.0};
    return d;
}

const FeatureDomain& velocity() {
    static const FeatureDomain d{"vel", -3.0, 3.0, -1.0, 1.0};
    return d;
}

const FeatureDomain& body() {
    static const FeatureDomain d{"body", -180.0, 180.0, -1.0, 1.0};
    return d;
}

const FeatureDomain& pos_count() {
    static const FeatureDomain d{"pos_count", 0.0, 30.0, 0.0, 1.0};
    return d;
}

}  // namespace domains

double scale(double value, const FeatureDomain& domain) {
    const double t = (value - domain.lo) / (domain.hi - domain.lo);
    return domain.scaled_lo + t * (domain.scaled_hi - domain.scaled_lo);
}

double unscale(double scaled, const FeatureDomain& domain) {
    const double t = (scaled - domain.scaled_lo) / (domain.scaled_hi - domain.scaled_lo);
    return domain.lo + t * (domain.hi - domain.lo);
}

const FeatureDomain& column_domain(int block_column) {
    switch (schema::column_feature(block_column)) {
        case schema::Feature::PosX:
            return domains::position_x();
        case schema::Feature::PosY:
            return domains::position_y();
        case schema::Feature::VelX:
        case schema::Feature::VelY:
            return domains::velocity();
        case schema::Feature::Body:
            return domains::body();
        case schema::Feature::PosCount:
            return domains::pos_count();
    }
    throw std::logic_error("column_domain: bad column");
}

void scale_block(schema::Block& block) {
    for (int c = 0; c < schema::kBlockWidth; ++c)
        block[static_cast<std::size_t>(c)] = scale(block[static_cast<std::size_t>(c)], column_domain(c));
}

void unscale_block(schema::Block& block) {
    for (int c = 0; c < schema::kBlockWidth; ++c)
        block[static_cast<std::size_t>(c)] = unscale(block[static_cast<std::size_t>(c)], column_domain(c));
}

std::vector<double> impute(const ObjectBelief& belief, bool has_body) {
    std::vector<double> out;
    out.reserve(has_body ? 6 : 5);
    out.push_back(scale(belief.position.x, domains::position_x()));
    out.push_back(scale(belief.position.y, domains::position_y()));
    out.push_back(scale(belief.velocity.x, domains::velocity()));
    out.push_back(scale(belief.velocity.y, domains::velocity()));
    if (has_body) out.push_back(scale(belief.body_deg, domains::body()));
    out.push_back(scale(static_cast<double>(belief.pos_count), domains::pos_count()));
    return out;
}

}  // namespace unfog
