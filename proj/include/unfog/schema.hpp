#pragma once

#include <array>
#include <string>
#include <vector>

#include "unfog/belief.hpp"

namespace unfog::schema {

// One feature block is 137 columns: ball (x, y, vx, vy, pos_count), then the
// 11 left-team players, then the 11 right-team players, each contributing
// (x, y, vx, vy, body, pos_count). A full record row is the cycle column
// followed by the noisy block and the accurate block: 1 + 2*137 = 275.

constexpr int kBallColumns = 5;
constexpr int kPlayerColumns = 6;
constexpr int kBlockWidth = kBallColumns + 2 * kPlayersPerTeam * kPlayerColumns;  // 137
constexpr int kRecordWidth = 1 + 2 * kBlockWidth;  // 275
constexpr int kTargetWidth = 2 * kPlayersPerTeam;  // opponent (left team) x, y

constexpr int ball_offset() { return 0; }
constexpr int left_offset(int index) { return kBallColumns + kPlayerColumns * index; }
constexpr int right_offset(int index) {
    return kBallColumns + kPlayerColumns * (kPlayersPerTeam + index);
}

enum class Feature { PosX, PosY, VelX, VelY, Body, PosCount };

/// Kind of each column within a 137-wide block.
Feature column_feature(int block_column);

/// Column names of one block, with the given prefix ("n_" or "a_").
std::vector<std::string> block_column_names(const std::string& prefix);

using Block = std::array<double, kBlockWidth>;

/// Noisy block from a belief state, in physical units. Unknown objects carry
/// the sentinel position, zero velocity and body, and pos_count 30.
Block belief_block(const BeliefState& belief);

/// Accurate block from a world snapshot; pos_counts are all zero.
Block truth_block(const WorldSnapshot& truth);

}  // namespace unfog::schema
