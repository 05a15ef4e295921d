#include "unfog/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "unfog/geometry.hpp"
#include "unfog/rng.hpp"
#include "unfog/scaling.hpp"
#include "unfog/textio.hpp"

namespace unfog {

namespace {

constexpr std::string_view kDatasetTag = "unfog-dataset";

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line_no, const std::string& what) {
    std::ostringstream os;
    os << path.string() << ":" << line_no << ": " << what;
    throw std::runtime_error(os.str());
}

SampleMeta make_meta(const Record& last, int match_id, int observer_unum) {
    SampleMeta meta;
    meta.match_id = match_id;
    meta.last_cycle = last.cycle;
    const int obs = schema::right_offset(observer_unum - 1);
    const Vec2 observer{last.accurate[static_cast<std::size_t>(obs)],
                        last.accurate[static_cast<std::size_t>(obs + 1)]};
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int off = schema::left_offset(i);
        const Vec2 opponent{last.accurate[static_cast<std::size_t>(off)],
                            last.accurate[static_cast<std::size_t>(off + 1)]};
        meta.opponent_distance[static_cast<std::size_t>(i)] = dist(observer, opponent);
        meta.opponent_pos_count[static_cast<std::size_t>(i)] =
            static_cast<int>(std::lround(last.noisy[static_cast<std::size_t>(off + 5)]));
    }
    return meta;
}

Target make_target(const Record& last) {
    Target target{};
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int off = schema::left_offset(i);
        target[static_cast<std::size_t>(2 * i)] =
            scale(last.accurate[static_cast<std::size_t>(off)], domains::position_x());
        target[static_cast<std::size_t>(2 * i + 1)] =
            scale(last.accurate[static_cast<std::size_t>(off + 1)], domains::position_y());
    }
    return target;
}

/// Appends one sample whose W input rows are in `cycles`/`blocks`, sharing
/// the overlapping W - 1 rows with the previous sample when they line up.
void commit_sample(Dataset& ds, const std::vector<int>& cycles, const std::vector<schema::Block>& blocks,
                   const Target& target, const SampleMeta& meta) {
    const int w = ds.lookback;
    bool share = false;
    if (!ds.samples.empty() && w > 1) {
        const Dataset::Sample& prev = ds.samples.back();
        if (prev.meta.match_id == meta.match_id) {
            share = true;
            for (int k = 0; k + 1 < w && share; ++k) {
                const auto idx = static_cast<std::size_t>(prev.first_row + 1 + k);
                share = ds.row_cycles[idx] == cycles[static_cast<std::size_t>(k)] &&
                        ds.rows[idx] == blocks[static_cast<std::size_t>(k)];
            }
        }
    }
    Dataset::Sample sample;
    sample.target = target;
    sample.meta = meta;
    if (share) {
        sample.first_row = ds.samples.back().first_row + 1;
        ds.rows.push_back(blocks.back());
        ds.row_cycles.push_back(cycles.back());
    } else {
        sample.first_row = static_cast<std::int64_t>(ds.rows.size());
        ds.rows.insert(ds.rows.end(), blocks.begin(), blocks.end());
        ds.row_cycles.insert(ds.row_cycles.end(), cycles.begin(), cycles.end());
    }
    ds.samples.push_back(sample);
}

}  // namespace

void append_windows(Dataset& dataset, const PlayOnSequence& sequence, int match_id, int observer_unum) {
    const int w = dataset.lookback;
    const auto length = static_cast<int>(sequence.records.size());
    if (length < w) return;

    const std::int64_t base = static_cast<std::int64_t>(dataset.rows.size());
    for (const Record& rec : sequence.records) {
        schema::Block scaled = rec.noisy;
        scale_block(scaled);
        dataset.rows.push_back(scaled);
        dataset.row_cycles.push_back(rec.cycle);
    }
    for (int k = 0; k + w <= length; ++k) {
        const Record& last = sequence.records[static_cast<std::size_t>(k + w - 1)];
        Dataset::Sample sample;
        sample.first_row = base + k;
        sample.target = make_target(last);
        sample.meta = make_meta(last, match_id, observer_unum);
        dataset.samples.push_back(sample);
    }
}

Dataset build_windows(const std::vector<PlayOnSequence>& sequences, int lookback, int match_id,
                      int observer_unum) {
    if (lookback < 1) throw std::invalid_argument("lookback must be >= 1");
    Dataset ds;
    ds.lookback = lookback;
    for (const auto& seq : sequences) append_windows(ds, seq, match_id, observer_unum);
    return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << kDatasetTag << " v1 lookback=" << dataset.lookback << " block=" << schema::kBlockWidth
        << " target=" << schema::kTargetWidth << "\n";
    out << "sample\tkind\tcycle";
    for (const auto& name : schema::block_column_names("")) out << "\t" << name;
    out << "\n";
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& s = dataset.samples[i];
        for (int k = 0; k < dataset.lookback; ++k) {
            const auto row_idx = static_cast<std::size_t>(s.first_row + k);
            out << i << "\tin\t" << dataset.row_cycles[row_idx];
            for (double v : dataset.rows[row_idx]) out << "\t" << textio::format_double(v);
            out << "\n";
        }
        out << i << "\ttarget";
        for (double v : s.target) out << "\t" << textio::format_double(v);
        out << "\n";
        out << i << "\tmeta\t" << s.meta.match_id << "\t" << s.meta.last_cycle;
        for (double v : s.meta.opponent_distance) out << "\t" << textio::format_double(v);
        for (int pc : s.meta.opponent_pos_count) out << "\t" << pc;
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty dataset file");
    Dataset ds;
    {
        std::istringstream hs(line);
        std::string tag, version;
        hs >> tag >> version;
        if (tag != kDatasetTag) fail(path, 1, "not a dataset file (tag '" + tag + "')");
        if (version != "v1") fail(path, 1, "unsupported dataset version '" + version + "'");
        std::string kv;
        int block = -1, target = -1;
        while (hs >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) fail(path, 1, "malformed header field '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const auto value = static_cast<int>(textio::parse_int(kv.substr(eq + 1)));
            if (key == "lookback") ds.lookback = value;
            else if (key == "block") block = value;
            else if (key == "target") target = value;
            else fail(path, 1, "unknown header field '" + key + "'");
        }
        if (ds.lookback < 1) fail(path, 1, "bad lookback");
        if (block != schema::kBlockWidth) fail(path, 1, "unexpected block width");
        if (target != schema::kTargetWidth) fail(path, 1, "unexpected target width");
    }
    if (!std::getline(in, line)) fail(path, 2, "missing column-name line");

    const std::size_t in_fields = 3 + static_cast<std::size_t>(schema::kBlockWidth);
    const std::size_t target_fields = 2 + static_cast<std::size_t>(schema::kTargetWidth);
    const std::size_t meta_fields = 4 + 2 * static_cast<std::size_t>(kPlayersPerTeam);

    std::vector<int> cycles;
    std::vector<schema::Block> blocks;
    bool have_target = false;
    Target target{};
    std::size_t line_no = 2;
    std::size_t next_sample = 0;

    while (std::getline(in, line)) {
        ++line_no;
        auto sv = textio::strip(line);
        if (sv.empty()) continue;
        auto fields = textio::split(sv, '\t');
        if (fields.size() < 2) fail(path, line_no, "truncated row");
        std::size_t sample_id = 0;
        try {
            sample_id = static_cast<std::size_t>(textio::parse_int(fields[0]));
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
        if (sample_id != next_sample) fail(path, line_no, "sample ids must be consecutive from 0");
        const std::string_view kind = fields[1];
        try {
            if (kind == "in") {
                if (have_target) throw std::runtime_error("input row after target row");
                if (fields.size() != in_fields)
                    throw std::runtime_error("expected " + std::to_string(in_fields) + " columns, found " +
                                             std::to_string(fields.size()));
                if (static_cast<int>(blocks.size()) >= ds.lookback)
                    throw std::runtime_error("more input rows than lookback");
                cycles.push_back(static_cast<int>(textio::parse_int(fields[2])));
                schema::Block b{};
                for (int c = 0; c < schema::kBlockWidth; ++c)
                    b[static_cast<std::size_t>(c)] = textio::parse_double(fields[static_cast<std::size_t>(3 + c)]);
                blocks.push_back(b);
            } else if (kind == "target") {
                if (static_cast<int>(blocks.size()) != ds.lookback)
                    throw std::runtime_error("sample has " + std::to_string(blocks.size()) +
                                             " input rows, expected " + std::to_string(ds.lookback));
                if (fields.size() != target_fields)
                    throw std::runtime_error("expected " + std::to_string(target_fields) + " columns, found " +
                                             std::to_string(fields.size()));
                for (int c = 0; c < schema::kTargetWidth; ++c)
                    target[static_cast<std::size_t>(c)] =
                        textio::parse_double(fields[static_cast<std::size_t>(2 + c)]);
                have_target = true;
            } else if (kind == "meta") {
                if (!have_target) throw std::runtime_error("meta row before target row");
                if (fields.size() != meta_fields)
                    throw std::runtime_error("expected " + std::to_string(meta_fields) + " columns, found " +
                                             std::to_string(fields.size()));
                SampleMeta meta;
                meta.match_id = static_cast<int>(textio::parse_int(fields[2]));
                meta.last_cycle = static_cast<int>(textio::parse_int(fields[3]));
                for (int i = 0; i < kPlayersPerTeam; ++i) {
                    meta.opponent_distance[static_cast<std::size_t>(i)] =
                        textio::parse_double(fields[static_cast<std::size_t>(4 + i)]);
                    meta.opponent_pos_count[static_cast<std::size_t>(i)] = static_cast<int>(
                        textio::parse_int(fields[static_cast<std::size_t>(4 + kPlayersPerTeam + i)]));
                }
                commit_sample(ds, cycles, blocks, target, meta);
                cycles.clear();
                blocks.clear();
                have_target = false;
                ++next_sample;
            } else {
                throw std::runtime_error("unknown row kind '" + std::string(kind) + "'");
            }
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
    }
    if (!blocks.empty() || have_target) fail(path, line_no, "file ends mid-sample");
    return ds;
}

namespace {

Dataset filter_matches(const Dataset& src, const std::set<int>& keep) {
    Dataset dst;
    dst.lookback = src.lookback;
    std::int64_t last_src_first = -2;
    for (const auto& s : src.samples) {
        if (!keep.contains(s.meta.match_id)) continue;
        const int w = src.lookback;
        Dataset::Sample copy = s;
        if (!dst.samples.empty() && dst.samples.back().meta.match_id == s.meta.match_id &&
            last_src_first + 1 == s.first_row) {
            copy.first_row = dst.samples.back().first_row + 1;
            const auto idx = static_cast<std::size_t>(s.first_row + w - 1);
            dst.rows.push_back(src.rows[idx]);
            dst.row_cycles.push_back(src.row_cycles[idx]);
        } else {
            copy.first_row = static_cast<std::int64_t>(dst.rows.size());
            for (int k = 0; k < w; ++k) {
                const auto idx = static_cast<std::size_t>(s.first_row + k);
                dst.rows.push_back(src.rows[idx]);
                dst.row_cycles.push_back(src.row_cycles[idx]);
            }
        }
        last_src_first = s.first_row;
        dst.samples.push_back(copy);
    }
    return dst;
}

}  // namespace

DatasetSplit split_by_match(const Dataset& dataset, const SplitFractions& fractions, std::uint64_t seed) {
    const double sum = fractions.train + fractions.validation + fractions.test;
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");
    if (fractions.train < 0 || fractions.validation < 0 || fractions.test < 0)
        throw std::invalid_argument("split fractions must be non-negative");

    std::vector<int> ids;
    for (const auto& s : dataset.samples)
        if (ids.empty() || ids.back() != s.meta.match_id) {
            if (std::find(ids.begin(), ids.end(), s.meta.match_id) == ids.end()) ids.push_back(s.meta.match_id);
        }
    const int m = static_cast<int>(ids.size());
    if (m < 3) throw std::invalid_argument("need at least 3 matches to split, have " + std::to_string(m));

    // Largest-remainder apportionment, then guarantee every split with a
    // nonzero fraction at least one match.
    const double want[3] = {fractions.train * m, fractions.validation * m, fractions.test * m};
    int counts[3];
    double rem[3];
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
        counts[i] = static_cast<int>(std::floor(want[i]));
        rem[i] = want[i] - counts[i];
        assigned += counts[i];
    }
    while (assigned < m) {
        const int i = static_cast<int>(std::max_element(rem, rem + 3) - rem);
        ++counts[i];
        rem[i] = -1.0;
        ++assigned;
    }
    for (int i = 0; i < 3; ++i) {
        const double f = i == 0 ? fractions.train : i == 1 ? fractions.validation : fractions.test;
        if (f > 0.0 && counts[i] == 0) {
            const int donor = static_cast<int>(std::max_element(counts, counts + 3) - counts);
            --counts[donor];
            ++counts[i];
        }
    }

    auto rng = seeded_rng(seed, {"split"});
    shuffle(ids, rng);

    std::set<int> train_ids(ids.begin(), ids.begin() + counts[0]);
    std::set<int> val_ids(ids.begin() + counts[0], ids.begin() + counts[0] + counts[1]);
    std::set<int> test_ids(ids.begin() + counts[0] + counts[1], ids.end());

    DatasetSplit split;
    split.train = filter_matches(dataset, train_ids);
    split.validation = filter_matches(dataset, val_ids);
    split.test = filter_matches(dataset, test_ids);
    return split;
}

}  // namespace unfog
