#pragma once

#include <string>
#include <vector>

#include "unfog/belief.hpp"
#include "unfog/schema.hpp"

namespace unfog {

/// Affine map sending [lo, hi] onto [scaled_lo, scaled_hi]. Values outside
/// the domain pass through the same map, which is how the off-field sentinel
/// (-105, -68) lands exactly on (-2, -2).
struct FeatureDomain {
    std::string name;
    double lo;
    double hi;
    double scaled_lo;
    double scaled_hi;
};

namespace domains {
const FeatureDomain& position_x();  // [-52.5, 52.5] -> [-1, 1]
const FeatureDomain& position_y();  // [-34, 34]     -> [-1, 1]
const FeatureDomain& velocity();    // [-3, 3]       -> [-1, 1]
const FeatureDomain& body();        // [-180, 180]   -> [-1, 1]
const FeatureDomain& pos_count();   // [0, 30]       -> [0, 1]
}  // namespace domains

double scale(double value, const FeatureDomain& domain);
double unscale(double scaled, const FeatureDomain& domain);

/// Domain of one column within a 137-wide feature block.
const FeatureDomain& column_domain(int block_column);

/// Scales a physical-unit block in place.
void scale_block(schema::Block& block);
void unscale_block(schema::Block& block);

/// Scaled feature fragment for one tracked object: (x, y, vx, vy[, body],
/// pos_count). Unknown objects are imputed as the scaled sentinel position
/// (-2, -2), zero velocity and body, and pos_count 1.
std::vector<double> impute(const ObjectBelief& belief, bool has_body);

}  // namespace unfog
