#include "unfog/eval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "unfog/scaling.hpp"

namespace unfog::eval {

int distance_bin(double distance) {
    if (!(distance >= 0.0)) throw std::invalid_argument("distance must be non-negative");
    const int bin = static_cast<int>(distance / kDistBinWidth);
    return std::min(bin, kDistBins - 1);
}

double distance_bin_lo(int bin) { return kDistBinWidth * bin; }

double distance_bin_hi(int bin) {
    return bin == kDistBins - 1 ? std::numeric_limits<double>::infinity() : kDistBinWidth * (bin + 1);
}

double distance_bin_center(int bin) { return kDistBinWidth * bin + kDistBinWidth / 2.0; }

void ErrorGrid::add(int pos_count, double distance, double error) {
    if (pos_count < 0 || pos_count >= kPosBins)
        throw std::invalid_argument("pos_count out of range: " + std::to_string(pos_count));
    cells[static_cast<std::size_t>(pos_count)][static_cast<std::size_t>(distance_bin(distance))].add(error);
}

long long ErrorGrid::total() const {
    long long n = 0;
    for (const auto& row : cells)
        for (const auto& cell : row) n += cell.count;
    return n;
}

double sample_error(const Vec2& predicted, const Vec2& accurate) { return dist(predicted, accurate); }

namespace {

std::vector<int> selected_subjects(const SubjectSelector& sel) {
    if (sel.all_opponents) {
        std::vector<int> all(kPlayersPerTeam);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    if (sel.subject_unum < 1 || sel.subject_unum > kPlayersPerTeam)
        throw std::invalid_argument("subject uniform number must be 1..11");
    return {sel.subject_unum - 1};
}

Vec2 accurate_position(const Dataset::Sample& s, int subject) {
    return {unscale(s.target[static_cast<std::size_t>(2 * subject)], domains::position_x()),
            unscale(s.target[static_cast<std::size_t>(2 * subject + 1)], domains::position_y())};
}

}  // namespace

ErrorGrid bin_errors(const Predictor& predictor, const Dataset& test, const SubjectSelector& sel) {
    const std::vector<int> subjects = selected_subjects(sel);
    ErrorGrid grid;
    constexpr std::size_t kChunk = 512;
    std::vector<std::size_t> idx;
    for (std::size_t at = 0; at < test.samples.size(); at += kChunk) {
        const std::size_t take = std::min(kChunk, test.samples.size() - at);
        idx.resize(take);
        std::iota(idx.begin(), idx.end(), at);
        const auto predictions = predictor.predict_batch(test, idx);
        for (std::size_t r = 0; r < take; ++r) {
            const auto& sample = test.samples[at + r];
            for (int subject : subjects) {
                const auto si = static_cast<std::size_t>(subject);
                const int pc = sample.meta.opponent_pos_count[si];
                if (pc >= kMaxPosCount) continue;  // forgotten subject, nothing to score
                const double err = sample_error(predictions[r].position[si], accurate_position(sample, subject));
                grid.add(pc, sample.meta.opponent_distance[si], err);
            }
        }
    }
    return grid;
}

ErrSubGrid err_sub(const ErrorGrid& first, const ErrorGrid& second, long long min_count) {
    ErrSubGrid out;
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) {
            const GridCell& a = first.at(pc, db);
            const GridCell& b = second.at(pc, db);
            if (a.count >= min_count && b.count >= min_count)
                out.diff[static_cast<std::size_t>(pc)][static_cast<std::size_t>(db)] = b.mean() - a.mean();
        }
    return out;
}

std::vector<RatePoint> distance_rate_curve(
    const std::vector<std::pair<std::string, const ErrorGrid*>>& grids) {
    std::vector<RatePoint> out;
    for (int db = 0; db < kDistBins; ++db) {
        for (const auto& [method, grid] : grids) {
            GridCell merged;
            for (int pc = 0; pc < kPosBins; ++pc) merged.merge(grid->at(pc, db));
            if (!merged.count) continue;
            out.push_back(RatePoint{db, method, merged.mean() / distance_bin_center(db), merged.count});
        }
    }
    return out;
}

long long PosCountHistogram::total() const {
    long long n = 0;
    for (long long c : counts) n += c;
    return n;
}

PosCountHistogram poscount_histogram(const Dataset& test, const SubjectSelector& sel) {
    const std::vector<int> subjects = selected_subjects(sel);
    PosCountHistogram hist;
    for (const auto& sample : test.samples)
        for (int subject : subjects) {
            const int pc = sample.meta.opponent_pos_count[static_cast<std::size_t>(subject)];
            if (pc >= kMaxPosCount) continue;
            ++hist.counts[static_cast<std::size_t>(pc)];
        }
    return hist;
}

namespace {

std::vector<double> ranks_with_ties(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    const auto ra = ranks_with_ties(a);
    const auto rb = ranks_with_ties(b);
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

GridCell collapse(const ErrorGrid& grid) {
    GridCell out;
    for (const auto& row : grid.cells)
        for (const auto& cell : row) out.merge(cell);
    return out;
}

std::array<GridCell, kPosBins> collapse_by_poscount(const ErrorGrid& grid) {
    std::array<GridCell, kPosBins> out{};
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) out[static_cast<std::size_t>(pc)].merge(grid.at(pc, db));
    return out;
}

std::array<GridCell, kDistBins> collapse_by_distance(const ErrorGrid& grid) {
    std::array<GridCell, kDistBins> out{};
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) out[static_cast<std::size_t>(db)].merge(grid.at(pc, db));
    return out;
}

GridCell collapse_region(const ErrorGrid& grid, int min_pos_count) {
    GridCell out;
    for (int pc = min_pos_count; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) out.merge(grid.at(pc, db));
    return out;
}

}  // namespace unfog::eval
