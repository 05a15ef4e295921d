#include "unfog/schema.hpp"

#include <stdexcept>
namespace unfog::schema {

Feature column_feature(int block_column) {
    if (block_column < 0 || block_column >= kBlockWidth) {
        throw std::out_of_range("block column " + std::to_string(block_column) +
                                " outside [0, " + std::to_string(kBlockWidth) + ")");
    }
    if (block_column < kBallColumns) {
        constexpr Feature ball[] = {Feature::PosX, Feature::PosY, Feature::VelX,
                                    Feature::VelY, Feature::PosCount};
        return ball[block_column];
    }
    constexpr Feature player[] = {Feature::PosX, Feature::PosY, Feature::VelX,
                                  Feature::VelY, Feature::Body, Feature::PosCount};
    return player[(block_column - kBallColumns) % kPlayerColumns];
}

std::vector<std::string> block_column_names(const std::string& prefix) {
    std::vector<std::string> names;
    names.reserve(kBlockWidth);
    for (const char* f : {"ball_x", "ball_y", "ball_vx", "ball_vy", "ball_pc"}) {
        names.push_back(prefix + f);
    }
    for (const char* side : {"l", "r"}) {
        for (int unum = 1; unum <= kPlayersPerTeam; ++unum) {
            for (const char* f : {"x", "y", "vx", "vy", "body", "pc"}) {
                names.push_back(prefix + side + std::to_string(unum) + "_" + f);
            }
        }
    }
    return names;
}

namespace {

void put_object(Block& block, int offset, const ObjectBelief& b, bool has_body) {
    block[static_cast<std::size_t>(offset + 0)] = b.position.x;
    block[static_cast<std::size_t>(offset + 1)] = b.position.y;
    block[static_cast<std::size_t>(offset + 2)] = b.velocity.x;
    block[static_cast<std::size_t>(offset + 3)] = b.velocity.y;
    int i = 4;
    if (has_body) block[static_cast<std::size_t>(offset + i++)] = b.body_deg;
    block[static_cast<std::size_t>(offset + i)] = static_cast<double>(b.pos_count);
}

void put_truth(Block& block, int offset, const Vec2& pos, const Vec2& vel,
               double body, bool has_body) {
    block[static_cast<std::size_t>(offset + 0)] = pos.x;
    block[static_cast<std::size_t>(offset + 1)] = pos.y;
    block[static_cast<std::size_t>(offset + 2)] = vel.x;
    block[static_cast<std::size_t>(offset + 3)] = vel.y;
    int i = 4;
    if (has_body) block[static_cast<std::size_t>(offset + i++)] = body;
    block[static_cast<std::size_t>(offset + i)] = 0.0;
}

}  // namespace

Block belief_block(const BeliefState& belief) {
    Block block{};
    put_object(block, ball_offset(), belief.ball, false);
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        put_object(block, left_offset(i), belief.left[static_cast<std::size_t>(i)], true);
        put_object(block, right_offset(i), belief.right[static_cast<std::size_t>(i)], true);
    }
    return block;
}

Block truth_block(const WorldSnapshot& truth) {
    Block block{};
    put_truth(block, ball_offset(), truth.ball_position, truth.ball_velocity, 0.0, false);
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        put_truth(block, left_offset(i), truth.left[idx].position,
                  truth.left[idx].velocity, truth.left[idx].body_deg, true);
        put_truth(block, right_offset(i), truth.right[idx].position,
                  truth.right[idx].velocity, truth.right[idx].body_deg, true);
    }
    return block;
}

}  // namespace unfog::schema
