#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "unfog/belief.hpp"
#include "unfog/schema.hpp"

namespace unfog {

/// One extracted training record, in physical units. Column layout:
/// cycle, noisy block (137), accurate block (137) = 275 columns.
struct Record {
    int cycle = 0;
    schema::Block noisy{};     // from the observer's belief
    schema::Block accurate{};  // ground truth, pos_counts all 0
};

/// Maximal run of consecutive-cycle records.
struct PlayOnSequence {
    int start_cycle = 0;
    int end_cycle = 0;
    std::vector<Record> records;
};

/// On-disk row of a match trace: every cycle, any mode.
struct TraceRow {
    int cycle = 0;
    GameMode mode = GameMode::PlayOn;
    schema::Block noisy{};
    schema::Block accurate{};
};

struct TraceHeader {
    int match_id = 0;
    std::uint64_t seed = 0;
    int observer_unum = 0;
    double view_width_deg = 0.0;
    double max_visible_distance = 0.0;
    std::string neck_policy;
};

struct TraceData {
    TraceHeader header;
    std::vector<TraceRow> rows;
};

TraceRow make_trace_row(const WorldSnapshot& truth, const BeliefState& belief);

/// Tab-separated text with a self-describing header; values are written with
/// shortest round-trip formatting so read-back is bit exact.
void write_trace(const std::filesystem::path& path, const MatchTrace& trace);
TraceData read_trace(const std::filesystem::path& path);

/// Keeps PlayOn rows only, one Record per row, cycle order preserved.
std::vector<Record> extract_records(const TraceData& trace);
std::vector<Record> extract_records(const MatchTrace& trace);

/// Splits records (already in cycle order) into maximal consecutive runs.
std::vector<PlayOnSequence> split_sequences(const std::vector<Record>& records);

}  // namespace unfog
