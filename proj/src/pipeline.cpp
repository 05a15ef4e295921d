#include "unfog/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "unfog/belief.hpp"
#include "unfog/eval.hpp"
#include "unfog/nn.hpp"
#include "unfog/predictors.hpp"
#include "unfog/records.hpp"
#include "unfog/report.hpp"
#include "unfog/rng.hpp"
#include "unfog/textio.hpp"
#include "unfog/train.hpp"

namespace unfog {

namespace {

constexpr int kObserverUnum = 9;        // right-team observer
constexpr int kStaleRegionMinPos = 3;   // "stale" summary region: pos_count >= 3

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(values[i]);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& value) {
    std::vector<int> out;
    for (auto part : textio::split(value, ','))
        out.push_back(static_cast<int>(textio::parse_int(textio::strip(part))));
    return out;
}

bool parse_bool(const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw std::runtime_error("expected true/false/1/0, got '" + value + "'");
}

}  // namespace

ViewConfig PipelineConfig::view_config() const {
    ViewConfig view;
    view.width_deg = view_width;
    view.max_visible_distance = max_visible_distance;
    if (neck_policy == "rotating_scan") view.neck_policy = NeckPolicy::RotatingScan;
    else if (neck_policy == "ball_focused") view.neck_policy = NeckPolicy::BallFocused;
    else throw std::runtime_error("unknown neck_policy '" + neck_policy + "'");
    return view;
}

std::string PipelineConfig::canonical() const {
    std::ostringstream os;
    os << "all_opponents=" << (all_opponents ? 1 : 0) << "\n";
    os << "allow_custom=" << (allow_custom ? 1 : 0) << "\n";
    os << "architectures=" << join_ints(architectures) << "\n";
    os << "batch_size=" << batch_size << "\n";
    os << "cycles_per_match=" << cycles_per_match << "\n";
    os << "epochs=" << epochs << "\n";
    os << "jobs=" << jobs << "\n";
    os << "lookbacks=" << join_ints(lookbacks) << "\n";
    os << "matches=" << matches << "\n";
    os << "max_steps=" << max_steps << "\n";
    os << "max_visible_distance=" << textio::format_double(max_visible_distance) << "\n";
    os << "neck_policy=" << neck_policy << "\n";
    os << "seed=" << seed << "\n";
    os << "split=" << textio::format_double(split.train) << "," << textio::format_double(split.validation)
       << "," << textio::format_double(split.test) << "\n";
    os << "subject=" << subject << "\n";
    os << "view_width=" << textio::format_double(view_width) << "\n";
    return os.str();
}

void apply_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "matches") cfg.matches = static_cast<int>(textio::parse_int(value));
        else if (key == "cycles_per_match") cfg.cycles_per_match = static_cast<int>(textio::parse_int(value));
        else if (key == "view_width") cfg.view_width = textio::parse_double(value);
        else if (key == "max_visible_distance") cfg.max_visible_distance = textio::parse_double(value);
        else if (key == "neck_policy") cfg.neck_policy = value;
        else if (key == "seed") cfg.seed = textio::parse_uint(value);
        else if (key == "lookbacks") cfg.lookbacks = parse_int_list(value);
        else if (key == "architectures") cfg.architectures = parse_int_list(value);
        else if (key == "split") {
            auto parts = textio::split(value, ',');
            if (parts.size() != 3) throw std::runtime_error("split needs three fractions");
            cfg.split.train = textio::parse_double(textio::strip(parts[0]));
            cfg.split.validation = textio::parse_double(textio::strip(parts[1]));
            cfg.split.test = textio::parse_double(textio::strip(parts[2]));
        } else if (key == "epochs") cfg.epochs = static_cast<int>(textio::parse_int(value));
        else if (key == "batch_size") cfg.batch_size = static_cast<int>(textio::parse_int(value));
        else if (key == "max_steps") cfg.max_steps = textio::parse_int(value);
        else if (key == "subject") cfg.subject = static_cast<int>(textio::parse_int(value));
        else if (key == "all_opponents") cfg.all_opponents = parse_bool(value);
        else if (key == "allow_custom") cfg.allow_custom = parse_bool(value);
        else if (key == "jobs") cfg.jobs = static_cast<int>(textio::parse_int(value));
        else if (key == "output_dir") cfg.output_dir = value;
        else throw std::runtime_error("unknown config key '" + key + "'");
    } catch (const std::runtime_error& e) {
        if (std::string(e.what()).rfind("unknown config key", 0) == 0) throw;
        throw std::runtime_error("config key '" + key + "': " + e.what());
    }
}

PipelineConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    PipelineConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto sv = textio::strip(line);
        if (sv.empty() || sv.front() == '#') continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected key=value, got '" + std::string(sv) + "'");
        const std::string key{textio::strip(sv.substr(0, eq))};
        const std::string value{textio::strip(sv.substr(eq + 1))};
        apply_config_value(cfg, key, value);
    }
    return cfg;
}

void validate_config(const PipelineConfig& cfg) {
    auto reject = [](const std::string& what) { throw std::runtime_error("invalid config: " + what); };
    if (cfg.matches < 1) reject("matches must be >= 1");
    if (cfg.cycles_per_match < 1) reject("cycles_per_match must be >= 1");
    if (!cfg.allow_custom && cfg.view_width != 60.0 && cfg.view_width != 120.0 && cfg.view_width != 180.0)
        reject("view_width must be 60, 120 or 180 (or set allow_custom=true)");
    if (cfg.view_width <= 0.0 || cfg.view_width > 360.0) reject("view_width out of range");
    if (cfg.max_visible_distance <= 0.0) reject("max_visible_distance must be positive");
    cfg.view_config();  // validates neck_policy
    if (cfg.lookbacks.empty()) reject("lookbacks must not be empty");
    for (int w : cfg.lookbacks) {
        if (w < 1) reject("lookback must be >= 1");
        if (!cfg.allow_custom && w != 5 && w != 10 && w != 15)
            reject("lookback " + std::to_string(w) + " not in {5, 10, 15} (set allow_custom=true to permit)");
    }
    if (cfg.architectures.empty()) reject("architectures must not be empty");
    for (int a : cfg.architectures)
        if (a < 1 || a > 9) reject("architecture id " + std::to_string(a) + " not in 1..9");
    const double sum = cfg.split.train + cfg.split.validation + cfg.split.test;
    if (std::abs(sum - 1.0) > 1e-9) reject("split fractions must sum to 1");
    if (cfg.split.train < 0 || cfg.split.validation < 0 || cfg.split.test < 0)
        reject("split fractions must be non-negative");
    if (cfg.epochs < 1) reject("epochs must be >= 1");
    if (cfg.batch_size < 1) reject("batch_size must be >= 1");
    if (cfg.max_steps < 0) reject("max_steps must be >= 0");
    if (cfg.subject < 1 || cfg.subject > kPlayersPerTeam) reject("subject must be 1..11");
    if (cfg.jobs < 1) reject("jobs must be >= 1");
}

std::uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    }
    return h;
}

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) { validate_config(cfg_); }

std::filesystem::path Pipeline::trace_path(int match_id) const {
    char name[32];
    std::snprintf(name, sizeof(name), "match_%03d.tsv", match_id);
    return cfg_.output_dir / "traces" / name;
}

std::filesystem::path Pipeline::dataset_path(int lookback) const {
    return cfg_.output_dir / "datasets" / ("w" + std::to_string(lookback) + ".tsv");
}

std::filesystem::path Pipeline::model_path(int arch, int lookback) const {
    return cfg_.output_dir / "models" /
           ("arch" + std::to_string(arch) + "_w" + std::to_string(lookback) + ".ckpt");
}

std::filesystem::path Pipeline::train_log_path(int arch, int lookback) const {
    return cfg_.output_dir / "models" /
           ("arch" + std::to_string(arch) + "_w" + std::to_string(lookback) + "_log.tsv");
}

std::filesystem::path Pipeline::stamp_path(const std::string& stage) const {
    return cfg_.output_dir / ".stamps" / (stage + ".stamp");
}

std::optional<Pipeline::Stamp> Pipeline::read_stamp(const std::string& stage) const {
    std::ifstream in(stamp_path(stage));
    if (!in) return std::nullopt;
    std::string line;
    if (!std::getline(in, line) || textio::strip(line) != "unfog-stamp v1") return std::nullopt;
    Stamp stamp;
    bool have_key = false;
    while (std::getline(in, line)) {
        auto sv = textio::strip(line);
        if (sv.empty()) continue;
        auto fields = textio::split(sv, ' ');
        if (fields[0] == "stage") continue;
        if (fields[0] == "key" && fields.size() == 2) {
            stamp.key = textio::parse_uint(fields[1]);
            have_key = true;
        } else if (fields[0] == "output" && fields.size() >= 3) {
            // path may contain spaces; rejoin everything after the hash
            const auto hash = textio::parse_uint(fields[1]);
            const std::size_t cut = sv.find(fields[2]);
            stamp.outputs.emplace_back(hash, cfg_.output_dir / std::string(sv.substr(cut)));
        } else {
            return std::nullopt;
        }
    }
    if (!have_key) return std::nullopt;
    return stamp;
}

void Pipeline::write_stamp(const std::string& stage, const Stamp& stamp) const {
    std::filesystem::create_directories(stamp_path(stage).parent_path());
    std::ofstream out(stamp_path(stage));
    if (!out) throw std::runtime_error("cannot open " + stamp_path(stage).string() + " for writing");
    out << "unfog-stamp v1\n";
    out << "stage " << stage << "\n";
    out << "key " << stamp.key << "\n";
    for (const auto& [hash, path] : stamp.outputs)
        out << "output " << hash << " "
            << std::filesystem::relative(path, cfg_.output_dir).generic_string() << "\n";
    if (!out) throw std::runtime_error("write failed for " + stamp_path(stage).string());
}

bool Pipeline::stage_up_to_date(const std::string& stage, std::uint64_t key) const {
    const auto stamp = read_stamp(stage);
    if (!stamp || stamp->key != key) return false;
    for (const auto& [hash, path] : stamp->outputs) {
        std::error_code ec;
        if (!std::filesystem::exists(path, ec)) return false;
        if (hash_file(path) != hash) return false;
    }
    return true;
}

void Pipeline::check_artifact(const std::string& producer_stage, const std::filesystem::path& path) const {
    if (!std::filesystem::exists(path))
        throw std::runtime_error("missing artifact " + path.string() + " (run the " + producer_stage +
                                 " stage first)");
    const auto stamp = read_stamp(producer_stage);
    if (!stamp) return;  // no provenance to compare against
    for (const auto& [hash, recorded] : stamp->outputs) {
        if (recorded.lexically_normal() != path.lexically_normal()) continue;
        if (hash_file(path) != hash)
            throw std::runtime_error("corrupt artifact " + path.string() + ": content no longer matches the " +
                                     producer_stage + " stage stamp");
        return;
    }
}

bool Pipeline::run_generate() {
    std::ostringstream key_src;
    key_src << "generate-v1\n"
            << "matches=" << cfg_.matches << "\ncycles=" << cfg_.cycles_per_match
            << "\nview_width=" << textio::format_double(cfg_.view_width)
            << "\nmax_visible=" << textio::format_double(cfg_.max_visible_distance)
            << "\nneck=" << cfg_.neck_policy << "\nseed=" << cfg_.seed << "\n";
    const std::uint64_t key = fnv1a64(key_src.str());

    if (stage_up_to_date("generate", key)) {
        std::cout << "generate: up to date, skipped\n";
        return true;
    }

    std::filesystem::create_directories(cfg_.output_dir / "traces");
    MatchConfig match_cfg;
    match_cfg.cycles = cfg_.cycles_per_match;
    match_cfg.view = cfg_.view_config();
    match_cfg.seed = cfg_.seed;
    match_cfg.observer_unum = kObserverUnum;

    Stamp stamp;
    stamp.key = key;
    for (int m = 0; m < cfg_.matches; ++m) {
        const MatchTrace trace = run_match(match_cfg, m);
        const auto path = trace_path(m);
        write_trace(path, trace);
        stamp.outputs.emplace_back(hash_file(path), path);
        std::cout << "generate: match " << (m + 1) << "/" << cfg_.matches << "\r" << std::flush;
    }
    std::cout << "generate: wrote " << cfg_.matches << " traces    \n";
    write_stamp("generate", stamp);
    return false;
}

bool Pipeline::run_dataset() {
    std::vector<std::pair<std::uint64_t, std::filesystem::path>> inputs;
    for (int m = 0; m < cfg_.matches; ++m) {
        const auto path = trace_path(m);
        check_artifact("generate", path);
        inputs.emplace_back(hash_file(path), path);
    }
    std::ostringstream key_src;
    key_src << "dataset-v1\nlookbacks=" << join_ints(cfg_.lookbacks) << "\nobserver=" << kObserverUnum << "\n";
    for (const auto& [hash, path] : inputs) key_src << "input=" << hash << "\n";
    const std::uint64_t key = fnv1a64(key_src.str());

    if (stage_up_to_date("dataset", key)) {
        std::cout << "dataset: up to date, skipped\n";
        return true;
    }

    std::filesystem::create_directories(cfg_.output_dir / "datasets");
    Stamp stamp;
    stamp.key = key;
    for (int w : cfg_.lookbacks) {
        Dataset ds;
        ds.lookback = w;
        for (int m = 0; m < cfg_.matches; ++m) {
            const TraceData trace = read_trace(trace_path(m));
            const auto sequences = split_sequences(extract_records(trace));
            for (const auto& seq : sequences)
                append_windows(ds, seq, trace.header.match_id, trace.header.observer_unum);
        }
        const auto path = dataset_path(w);
        write_dataset(path, ds);
        stamp.outputs.emplace_back(hash_file(path), path);
        std::cout << "dataset: lookback " << w << ": " << ds.samples.size() << " samples\n";
    }
    write_stamp("dataset", stamp);
    return false;
}

namespace {

std::uint64_t derived_seed(std::uint64_t base, std::initializer_list<std::string_view> keys) {
    auto rng = seeded_rng(base, keys);
    return rng();
}

}  // namespace

bool Pipeline::run_train() {
    std::vector<std::pair<std::uint64_t, std::filesystem::path>> inputs;
    for (int w : cfg_.lookbacks) {
        const auto path = dataset_path(w);
        check_artifact("dataset", path);
        inputs.emplace_back(hash_file(path), path);
    }
    std::ostringstream key_src;
    key_src << "train-v1\narchs=" << join_ints(cfg_.architectures)
            << "\nlookbacks=" << join_ints(cfg_.lookbacks) << "\nepochs=" << cfg_.epochs
            << "\nbatch=" << cfg_.batch_size << "\nmax_steps=" << cfg_.max_steps << "\nseed=" << cfg_.seed
            << "\nsplit=" << textio::format_double(cfg_.split.train) << ","
            << textio::format_double(cfg_.split.validation) << "," << textio::format_double(cfg_.split.test)
            << "\n";
    for (const auto& [hash, path] : inputs) key_src << "input=" << hash << "\n";
    const std::uint64_t key = fnv1a64(key_src.str());

    if (stage_up_to_date("train", key)) {
        std::cout << "train: up to date, skipped\n";
        return true;
    }

    std::filesystem::create_directories(cfg_.output_dir / "models");
    Stamp stamp;
    stamp.key = key;
    for (int w : cfg_.lookbacks) {
        const Dataset full = read_dataset(dataset_path(w));
        const DatasetSplit split = split_by_match(full, cfg_.split, cfg_.seed);
        std::cout << "train: lookback " << w << ": " << split.train.size() << " train / "
                  << split.validation.size() << " val / " << split.test.size() << " test samples\n";
        for (int arch : cfg_.architectures) {
            const std::string tag = "arch" + std::to_string(arch) + "_w" + std::to_string(w);
            const std::uint64_t model_seed = derived_seed(cfg_.seed, {"train", tag});
            nn::Network net(nn::table_spec(arch, w), model_seed);

            TrainConfig tc;
            tc.epochs = cfg_.epochs;
            tc.batch_size = cfg_.batch_size;
            tc.seed = model_seed;
            tc.max_steps = cfg_.max_steps;
            const TrainReport report = train(net, split.train, split.validation, tc);

            const auto ckpt = model_path(arch, w);
            net.save(ckpt, static_cast<std::uint64_t>(report.total_steps));
            const auto log = train_log_path(arch, w);
            write_train_log(log, report);
            stamp.outputs.emplace_back(hash_file(ckpt), ckpt);
            stamp.outputs.emplace_back(hash_file(log), log);
            std::cout << "train: " << tag << ": best val mse " << textio::format_double(report.best_val_mse)
                      << " (epoch " << report.best_epoch << ", " << report.total_steps << " steps)\n";
        }
    }
    write_stamp("train", stamp);
    return false;
}

bool Pipeline::run_eval() {
    std::vector<std::pair<std::uint64_t, std::filesystem::path>> inputs;
    for (int w : cfg_.lookbacks) {
        const auto path = dataset_path(w);
        check_artifact("dataset", path);
        inputs.emplace_back(hash_file(path), path);
        for (int arch : cfg_.architectures) {
            const auto ckpt = model_path(arch, w);
            check_artifact("train", ckpt);
            inputs.emplace_back(hash_file(ckpt), ckpt);
        }
    }
    std::ostringstream key_src;
    key_src << "eval-v1\nsubject=" << cfg_.subject << "\nall_opponents=" << (cfg_.all_opponents ? 1 : 0)
            << "\nseed=" << cfg_.seed << "\nsplit=" << textio::format_double(cfg_.split.train) << ","
            << textio::format_double(cfg_.split.validation) << "," << textio::format_double(cfg_.split.test)
            << "\nmin_count=" << eval::kErrSubMinCount << "\n";
    for (const auto& [hash, path] : inputs) key_src << "input=" << hash << "\n";
    const std::uint64_t key = fnv1a64(key_src.str());

    if (stage_up_to_date("eval", key)) {
        std::cout << "eval: up to date, skipped\n";
        return true;
    }

    const auto grids_dir = cfg_.output_dir / "grids";
    std::filesystem::create_directories(grids_dir);
    eval::SubjectSelector selector{cfg_.all_opponents, cfg_.subject};

    Stamp stamp;
    stamp.key = key;
    auto emit = [&](const std::filesystem::path& path) { stamp.outputs.emplace_back(hash_file(path), path); };

    for (int w : cfg_.lookbacks) {
        const Dataset full = read_dataset(dataset_path(w));
        const DatasetSplit split = split_by_match(full, cfg_.split, cfg_.seed);
        const Dataset& test = split.test;
        const std::string wtag = "_w" + std::to_string(w);

        struct Entry {
            Predictor predictor;
            eval::ErrorGrid grid;
            double val_mse = 0.0;
            int arch = 0;
        };
        std::vector<Entry> entries;
        entries.push_back({Predictor::last_seen(), {}, 0.0, 0});
        entries.push_back({Predictor::velocity_extrapolation(), {}, 0.0, 0});
        for (int arch : cfg_.architectures) {
            auto net = std::make_shared<nn::Network>(nn::Network::load(model_path(arch, w)));
            const double val_mse =
                split.validation.samples.empty() ? 0.0 : evaluate_mse(*net, split.validation);
            entries.push_back(Entry{Predictor::model(std::move(net)), {}, val_mse, arch});
        }

        std::vector<std::pair<std::string, const eval::ErrorGrid*>> named_grids;
        for (auto& e : entries) {
            e.grid = eval::bin_errors(e.predictor, test, selector);
            const std::string base = e.predictor.kind() == PredictorKind::Model
                                         ? e.predictor.name()
                                         : e.predictor.name() + wtag;
            const auto path = grids_dir / (base + ".tsv");
            report::write_grid_tsv(path, e.grid);
            emit(path);
            named_grids.emplace_back(base, &e.grid);
            std::cout << "eval: " << base << ": mean error "
                      << textio::format_double(eval::collapse(e.grid).mean()) << " m over "
                      << e.grid.total() << " scored subjects\n";
        }

        // pairwise comparisons: every model against the last-seen baseline,
        // then best recurrent vs best dense when both kinds were trained
        const eval::ErrorGrid& baseline = entries[0].grid;
        const Entry* best_dnn = nullptr;
        const Entry* best_lstm = nullptr;
        for (const auto& e : entries) {
            if (e.predictor.kind() != PredictorKind::Model) continue;
            const auto path = grids_dir / ("errsub_" + e.predictor.name() + "_vs_last_seen.tsv");
            report::write_errsub_tsv(path, eval::err_sub(e.grid, baseline));
            emit(path);
            const bool is_lstm = e.predictor.network()->spec().kind == nn::ModelKind::LSTM;
            auto*& best = is_lstm ? best_lstm : best_dnn;
            if (!best || e.val_mse < best->val_mse) best = &e;
        }
        if (best_dnn && best_lstm) {
            const auto path = grids_dir / ("errsub_" + best_lstm->predictor.name() + "_vs_" +
                                           best_dnn->predictor.name() + ".tsv");
            report::write_errsub_tsv(path, eval::err_sub(best_lstm->grid, best_dnn->grid));
            emit(path);
        }

        const auto hist_path = grids_dir / ("histogram" + wtag + ".tsv");
        report::write_histogram_tsv(hist_path, eval::poscount_histogram(test, selector));
        emit(hist_path);

        const auto rates_path = grids_dir / ("rates" + wtag + ".tsv");
        report::write_curve_tsv(rates_path, eval::distance_rate_curve(named_grids));
        emit(rates_path);
    }
    write_stamp("eval", stamp);
    return false;
}

bool Pipeline::run_report() {
    const auto grids_dir = cfg_.output_dir / "grids";
    if (!std::filesystem::is_directory(grids_dir))
        throw std::runtime_error("missing artifact directory " + grids_dir.string() +
                                 " (run the eval stage first)");
    std::vector<std::filesystem::path> tables;
    for (const auto& entry : std::filesystem::directory_iterator(grids_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".tsv") tables.push_back(entry.path());
    std::sort(tables.begin(), tables.end());
    if (tables.empty()) throw std::runtime_error("no eval tables in " + grids_dir.string());

    std::ostringstream key_src;
    key_src << "report-v1\nconfig=" << fnv1a64(cfg_.canonical()) << "\n";
    for (const auto& path : tables) {
        check_artifact("eval", path);
        key_src << "input=" << hash_file(path) << " " << path.filename().generic_string() << "\n";
    }
    const std::uint64_t key = fnv1a64(key_src.str());

    if (stage_up_to_date("report", key)) {
        std::cout << "report: up to date, skipped\n";
        return true;
    }

    const auto figures_dir = cfg_.output_dir / "figures";
    std::filesystem::create_directories(figures_dir);
    Stamp stamp;
    stamp.key = key;
    std::vector<report::MethodSummary> methods;

    for (const auto& table : tables) {
        const std::string stem = table.stem().string();
        const auto figure = figures_dir / (stem + ".svg");
        if (stem.rfind("errsub_", 0) == 0) {
            report::render_errsub_heatmap_svg(figure, report::read_errsub_tsv(table),
                                              "error difference: " + stem.substr(7));
        } else if (stem.rfind("histogram", 0) == 0) {
            report::render_histogram_svg(figure, report::read_histogram_tsv(table),
                                         "scored subjects per pos count (" + stem + ")");
        } else if (stem.rfind("rates", 0) == 0) {
            report::render_curves_svg(figure, report::read_curve_tsv(table),
                                      "mean error over distance (" + stem + ")");
        } else {
            const auto grid = report::read_grid_tsv(table);
            report::render_grid_heatmap_svg(figure, grid, "mean error (m): " + stem);
            methods.push_back(report::MethodSummary{stem, eval::collapse(grid),
                                                    eval::collapse_region(grid, kStaleRegionMinPos)});
        }
        stamp.outputs.emplace_back(hash_file(figure), figure);
        std::cout << "report: " << figure.filename().string() << "\n";
    }

    const auto summary_path = cfg_.output_dir / "summary.txt";
    std::string echo = cfg_.canonical();
    std::replace(echo.begin(), echo.end(), '\n', ' ');
    report::write_summary(summary_path, std::string(textio::strip(echo)), methods, kStaleRegionMinPos);
    stamp.outputs.emplace_back(hash_file(summary_path), summary_path);
    std::cout << "report: summary.txt\n";
    write_stamp("report", stamp);
    return false;
}

void Pipeline::run_all() {
    run_generate();
    run_dataset();
    run_train();
    run_eval();
    run_report();
}

}  // namespace unfog
