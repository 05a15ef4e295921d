#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "unfog/eval.hpp"

namespace unfog::report {

// Machine-readable tables. Every cell of the 31 x 9 grid gets a row; empty
// cells keep their count and leave the statistics columns blank.
void write_grid_tsv(const std::filesystem::path& path, const eval::ErrorGrid& grid);
eval::ErrorGrid read_grid_tsv(const std::filesystem::path& path);

void write_errsub_tsv(const std::filesystem::path& path, const eval::ErrSubGrid& grid);
eval::ErrSubGrid read_errsub_tsv(const std::filesystem::path& path);

void write_histogram_tsv(const std::filesystem::path& path, const eval::PosCountHistogram& hist);
eval::PosCountHistogram read_histogram_tsv(const std::filesystem::path& path);

void write_curve_tsv(const std::filesystem::path& path, const std::vector<eval::RatePoint>& curve);
std::vector<eval::RatePoint> read_curve_tsv(const std::filesystem::path& path);

// Standalone SVG figures; output bytes depend only on the input tables.
void render_grid_heatmap_svg(const std::filesystem::path& path, const eval::ErrorGrid& grid,
                             const std::string& title);
void render_errsub_heatmap_svg(const std::filesystem::path& path, const eval::ErrSubGrid& grid,
                               const std::string& title);
void render_histogram_svg(const std::filesystem::path& path, const eval::PosCountHistogram& hist,
                          const std::string& title);
void render_curves_svg(const std::filesystem::path& path, const std::vector<eval::RatePoint>& curve,
                       const std::string& title);

struct MethodSummary {
    std::string name;
    eval::GridCell overall;
    eval::GridCell stale_region;  // cells with pos_count >= region_min_pos_count
};

void write_summary(const std::filesystem::path& path, const std::string& config_echo,
                   const std::vector<MethodSummary>& methods, int region_min_pos_count);

}  // namespace unfog::report
