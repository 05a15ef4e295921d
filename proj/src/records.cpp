#include "unfog/records.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "unfog/textio.hpp"

namespace unfog {

namespace {

constexpr std::string_view kTraceTag = "unfog-trace";
constexpr int kTraceVersion = 1;

std::string neck_policy_name(NeckPolicy p) {
    return p == NeckPolicy::RotatingScan ? "rotating_scan" : "ball_focused";
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line_no, const std::string& what) {
    std::ostringstream os;
    os << path.string() << ":" << line_no << ": " << what;
    throw std::runtime_error(os.str());
}

}  // namespace

TraceRow make_trace_row(const WorldSnapshot& truth, const BeliefState& belief) {
    TraceRow row;
    row.cycle = truth.cycle;
    row.mode = truth.mode;
    row.noisy = schema::belief_block(belief);
    row.accurate = schema::truth_block(truth);
    return row;
}

void write_trace(const std::filesystem::path& path, const MatchTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << kTraceTag << " v" << kTraceVersion
        << " match=" << trace.match_id
        << " seed=" << trace.seed
        << " observer=" << trace.observer_unum
        << " view_width=" << textio::format_double(trace.view.width_deg)
        << " max_visible=" << textio::format_double(trace.view.max_visible_distance)
        << " neck=" << neck_policy_name(trace.view.neck_policy) << "\n";
    out << "cycle\tmode";
    for (const auto& name : schema::block_column_names("n_")) out << "\t" << name;
    for (const auto& name : schema::block_column_names("a_")) out << "\t" << name;
    out << "\n";
    for (std::size_t i = 0; i < trace.truth.size(); ++i) {
        const TraceRow row = make_trace_row(trace.truth[i], trace.belief[i]);
        out << row.cycle << "\t" << (row.mode == GameMode::PlayOn ? 1 : 0);
        for (double v : row.noisy) out << "\t" << textio::format_double(v);
        for (double v : row.accurate) out << "\t" << textio::format_double(v);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

TraceData read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    TraceData data;

    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty trace file");
    {
        std::istringstream hs(line);
        std::string tag, version;
        hs >> tag >> version;
        if (tag != kTraceTag) fail(path, 1, "not a trace file (tag '" + tag + "')");
        if (version != "v1") fail(path, 1, "unsupported trace version '" + version + "'");
        std::string kv;
        while (hs >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) fail(path, 1, "malformed header field '" + kv + "'");
            std::string key = kv.substr(0, eq);
            std::string value = kv.substr(eq + 1);
            if (key == "match") data.header.match_id = static_cast<int>(textio::parse_int(value));
            else if (key == "seed") data.header.seed = static_cast<std::uint64_t>(textio::parse_int(value));
            else if (key == "observer") data.header.observer_unum = static_cast<int>(textio::parse_int(value));
            else if (key == "view_width") data.header.view_width_deg = textio::parse_double(value);
            else if (key == "max_visible") data.header.max_visible_distance = textio::parse_double(value);
            else if (key == "neck") data.header.neck_policy = value;
            else fail(path, 1, "unknown header field '" + key + "'");
        }
    }
    if (!std::getline(in, line)) fail(path, 2, "missing column-name line");

    const std::size_t expected = 2 + 2 * static_cast<std::size_t>(schema::kBlockWidth);
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        auto sv = textio::strip(line);
        if (sv.empty()) continue;
        auto fields = textio::split(sv, '\t');
        if (fields.size() != expected) {
            std::ostringstream os;
            os << "expected " << expected << " columns, found " << fields.size();
            fail(path, line_no, os.str());
        }
        TraceRow row;
        try {
            row.cycle = static_cast<int>(textio::parse_int(fields[0]));
            const long long mode = textio::parse_int(fields[1]);
            if (mode != 0 && mode != 1) throw std::runtime_error("mode flag must be 0 or 1");
            row.mode = mode == 1 ? GameMode::PlayOn : GameMode::Other;
            for (int c = 0; c < schema::kBlockWidth; ++c)
                row.noisy[static_cast<std::size_t>(c)] = textio::parse_double(fields[static_cast<std::size_t>(2 + c)]);
            for (int c = 0; c < schema::kBlockWidth; ++c)
                row.accurate[static_cast<std::size_t>(c)] =
                    textio::parse_double(fields[static_cast<std::size_t>(2 + schema::kBlockWidth + c)]);
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
        data.rows.push_back(row);
    }
    return data;
}

std::vector<Record> extract_records(const TraceData& trace) {
    std::vector<Record> out;
    for (const auto& row : trace.rows) {
        if (row.mode != GameMode::PlayOn) continue;
        out.push_back(Record{row.cycle, row.noisy, row.accurate});
    }
    return out;
}

std::vector<Record> extract_records(const MatchTrace& trace) {
    std::vector<Record> out;
    for (std::size_t i = 0; i < trace.truth.size(); ++i) {
        if (trace.truth[i].mode != GameMode::PlayOn) continue;
        const TraceRow row = make_trace_row(trace.truth[i], trace.belief[i]);
        out.push_back(Record{row.cycle, row.noisy, row.accurate});
    }
    return out;
}

std::vector<PlayOnSequence> split_sequences(const std::vector<Record>& records) {
    std::vector<PlayOnSequence> out;
    for (const auto& rec : records) {
        if (out.empty() || rec.cycle != out.back().end_cycle + 1) {
            out.push_back(PlayOnSequence{rec.cycle, rec.cycle, {}});
        }
        out.back().end_cycle = rec.cycle;
        out.back().records.push_back(rec);
    }
    return out;
}

}  // namespace unfog
