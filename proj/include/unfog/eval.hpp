#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unfog/dataset.hpp"
#include "unfog/predictors.hpp"

namespace unfog::eval {

inline constexpr int kPosBins = 31;  // pos_count 0..30, one bin each
inline constexpr int kDistBins = 9;  // [0,5) ... [35,40), then [40, inf)
inline constexpr double kDistBinWidth = 5.0;

int distance_bin(double distance);
double distance_bin_lo(int bin);
double distance_bin_hi(int bin);  // +inf for the open last bin
double distance_bin_center(int bin);

struct GridCell {
    long long count = 0;
    double sum = 0.0;
    double sumsq = 0.0;

    void add(double error) {
        ++count;
        sum += error;
        sumsq += error * error;
    }
    void merge(const GridCell& o) {
        count += o.count;
        sum += o.sum;
        sumsq += o.sumsq;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : std::nan(""); }
    double stddev() const {
        if (!count) return std::nan("");
        const double m = mean();
        return std::sqrt(std::max(0.0, sumsq / static_cast<double>(count) - m * m));
    }
};

/// Mean prediction error (meters) binned by pos count and true
/// observer-subject distance. Empty cells are missing data.
struct ErrorGrid {
    std::array<std::array<GridCell, kDistBins>, kPosBins> cells{};

    void add(int pos_count, double distance, double error);
    const GridCell& at(int pos_count, int dist_bin) const {
        return cells[static_cast<std::size_t>(pos_count)][static_cast<std::size_t>(dist_bin)];
    }
    long long total() const;
};

/// Which opponents are scored: the single subject (uniform number on the
/// opponent team) or all eleven.
struct SubjectSelector {
    bool all_opponents = false;
    int subject_unum = 5;
};

double sample_error(const Vec2& predicted, const Vec2& accurate);

ErrorGrid bin_errors(const Predictor& predictor, const Dataset& test, const SubjectSelector& sel = {});

/// Cell-wise mean(second) - mean(first) where both cells have at least
/// min_count samples; positive values mean the first predictor is better.
struct ErrSubGrid {
    std::array<std::array<std::optional<double>, kDistBins>, kPosBins> diff{};
    const std::optional<double>& at(int pos_count, int dist_bin) const {
        return diff[static_cast<std::size_t>(pos_count)][static_cast<std::size_t>(dist_bin)];
    }
};

inline constexpr long long kErrSubMinCount = 30;

ErrSubGrid err_sub(const ErrorGrid& first, const ErrorGrid& second, long long min_count = kErrSubMinCount);

/// Mean error per distance bin divided by the bin-center distance.
struct RatePoint {
    int bin = 0;
    std::string method;
    double rate = 0.0;
    long long count = 0;
};

std::vector<RatePoint> distance_rate_curve(
    const std::vector<std::pair<std::string, const ErrorGrid*>>& grids);

struct PosCountHistogram {
    std::array<long long, kPosBins> counts{};
    long long total() const;
};

/// Scored (sample, subject) pairs per pos count; forgotten subjects are not
/// scored, so the cap bin stays empty by construction.
PosCountHistogram poscount_histogram(const Dataset& test, const SubjectSelector& sel = {});

/// Spearman rank correlation with tie averaging; 0 when either side has no
/// rank variance.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

GridCell collapse(const ErrorGrid& grid);
std::array<GridCell, kPosBins> collapse_by_poscount(const ErrorGrid& grid);
std::array<GridCell, kDistBins> collapse_by_distance(const ErrorGrid& grid);
/// Aggregate mean error over cells with pos_count >= min_pos_count.
GridCell collapse_region(const ErrorGrid& grid, int min_pos_count);

}  // namespace unfog::eval
