#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "unfog/records.hpp"
#include "unfog/schema.hpp"

namespace unfog {

/// Per-sample side data for evaluation binning: the observer's true distance
/// to each opponent and each opponent's pos count, both at the window's last
/// cycle. Not part of the model input.
struct SampleMeta {
    int match_id = 0;
    int last_cycle = 0;
    std::array<double, kPlayersPerTeam> opponent_distance{};
    std::array<int, kPlayersPerTeam> opponent_pos_count{};
};

using Target = std::array<double, schema::kTargetWidth>;

/// Window samples over a shared row store. Consecutive windows overlap in
/// W - 1 rows, so rows are stored once and samples reference a contiguous
/// span [first_row, first_row + lookback).
struct Dataset {
    struct Sample {
        std::int64_t first_row = 0;
        Target target{};  // scaled accurate opponent x, y at the last cycle
        SampleMeta meta;
    };

    int lookback = 1;
    std::vector<schema::Block> rows;  // scaled noisy feature rows
    std::vector<int> row_cycles;      // cycle of each row
    std::vector<Sample> samples;

    const double* input_row(const Sample& s, int step) const {
        return rows[static_cast<std::size_t>(s.first_row + step)].data();
    }
    const double* last_input_row(const Sample& s) const { return input_row(s, lookback - 1); }
    std::size_t size() const { return samples.size(); }
};

/// Emits length - W + 1 samples per sequence; sequences shorter than W are
/// dropped. Inputs are the scaled noisy blocks; the target is the scaled
/// accurate opponent (left team) positions at the window's last cycle.
void append_windows(Dataset& dataset, const PlayOnSequence& sequence, int match_id, int observer_unum);

Dataset build_windows(const std::vector<PlayOnSequence>& sequences, int lookback, int match_id,
                      int observer_unum);

/// Tab-separated text, one group of rows per sample: W input rows, a target
/// row, and a meta row, all keyed by the sample index in column 0.
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

struct SplitFractions {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

struct DatasetSplit {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Assigns whole matches to splits (no window of one match ever crosses a
/// split boundary), deterministically from the seed. Requires at least three
/// distinct matches.
DatasetSplit split_by_match(const Dataset& dataset, const SplitFractions& fractions, std::uint64_t seed);

}  // namespace unfog
