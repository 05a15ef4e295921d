#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "unfog/pipeline.hpp"

using namespace unfog;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spill(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Small enough to run the whole pipeline in a few seconds.
PipelineConfig tiny_config(const std::filesystem::path& out) {
    PipelineConfig cfg;
    cfg.matches = 3;
    cfg.cycles_per_match = 260;
    cfg.lookbacks = {5};
    cfg.architectures = {1};
    cfg.epochs = 2;
    cfg.batch_size = 16;
    cfg.split = {0.34, 0.33, 0.33};
    cfg.output_dir = out;
    return cfg;
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config file parsing, overrides, and validation") {
    const auto dir = fresh_dir("unfog_pipeline_cfg");

    spill(dir / "good.cfg",
          "# experiment setup\n"
          "\n"
          "matches = 4\n"
          "epochs=3\n"
          "lookbacks = 5,10\n"
          "all_opponents = true\n"
          "split = 0.5, 0.25, 0.25\n");
    PipelineConfig cfg = parse_config_file(dir / "good.cfg");
    CHECK(cfg.matches == 4);
    CHECK(cfg.epochs == 3);
    CHECK(cfg.lookbacks == std::vector<int>{5, 10});
    CHECK(cfg.all_opponents);
    CHECK(cfg.split.train == 0.5);
    CHECK(cfg.split.validation == 0.25);
    CHECK(cfg.cycles_per_match == 6000);  // untouched keys keep defaults

    // Later assignments win, so command-line overrides go after the file.
    apply_config_value(cfg, "epochs", "7");
    CHECK(cfg.epochs == 7);

    CHECK_THROWS_WITH_AS(apply_config_value(cfg, "max_epochs", "3"),
                         doctest::Contains("unknown config key 'max_epochs'"), std::runtime_error);
    CHECK_THROWS_WITH_AS(apply_config_value(cfg, "epochs", "many"), doctest::Contains("'epochs'"),
                         std::runtime_error);

    spill(dir / "noeq.cfg", "matches = 4\n\nepochs\n");
    CHECK_THROWS_WITH_AS(parse_config_file(dir / "noeq.cfg"), doctest::Contains("noeq.cfg:3"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config_file(dir / "absent.cfg"), doctest::Contains("cannot open"),
                         std::runtime_error);

    // validate_config guards the whitelists unless allow_custom lifts them.
    PipelineConfig bad;
    bad.lookbacks = {7};
    CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("not in {5, 10, 15}"),
                         std::runtime_error);
    bad.allow_custom = true;
    CHECK_NOTHROW(validate_config(bad));

    bad = PipelineConfig{};
    bad.view_width = 90.0;
    CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("view_width must be 60, 120 or 180"),
                         std::runtime_error);
    bad.allow_custom = true;
    CHECK_NOTHROW(validate_config(bad));

    bad = PipelineConfig{};
    bad.split = {0.8, 0.1, 0.2};
    CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("sum to 1"), std::runtime_error);

    bad = PipelineConfig{};
    bad.architectures = {10};
    CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("not in 1..9"), std::runtime_error);

    bad = PipelineConfig{};
    bad.neck_policy = "fixed";
    CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("unknown neck_policy"),
                         std::runtime_error);

    // canonical() is a fixed-order echo that reparses to the same config.
    PipelineConfig echoed;
    std::istringstream lines(cfg.canonical());
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find('=');
        REQUIRE(eq != std::string::npos);
        apply_config_value(echoed, line.substr(0, eq), line.substr(eq + 1));
    }
    CHECK(echoed.canonical() == cfg.canonical());
}

TEST_CASE("artifact paths follow a stable naming scheme") {
    PipelineConfig cfg = tiny_config("out");
    Pipeline pipe(cfg);
    CHECK(pipe.trace_path(3) == std::filesystem::path("out") / "traces" / "match_003.tsv");
    CHECK(pipe.dataset_path(10) == std::filesystem::path("out") / "datasets" / "w10.tsv");
    CHECK(pipe.model_path(7, 5) == std::filesystem::path("out") / "models" / "arch7_w5.ckpt");
    CHECK(pipe.train_log_path(7, 5) == std::filesystem::path("out") / "models" / "arch7_w5_log.tsv");

    PipelineConfig bad = cfg;
    bad.matches = 0;
    CHECK_THROWS_WITH_AS(Pipeline{bad}, doctest::Contains("matches must be >= 1"), std::runtime_error);
}

TEST_CASE("stages memoize on content keys and rerun only when inputs change") {
    const auto out = fresh_dir("unfog_pipeline_memo");
    const PipelineConfig cfg = tiny_config(out);

    Pipeline first(cfg);
    CHECK_FALSE(first.run_generate());
    CHECK_FALSE(first.run_dataset());
    CHECK_FALSE(first.run_train());
    CHECK_FALSE(first.run_eval());
    CHECK_FALSE(first.run_report());

    // A fresh process over the same directory skips every stage.
    Pipeline again(cfg);
    CHECK(again.run_generate());
    CHECK(again.run_dataset());
    CHECK(again.run_train());
    CHECK(again.run_eval());
    CHECK(again.run_report());

    // Changing a training knob leaves the corpus alone but retrains, and the
    // new model content flows into the eval stage key.
    PipelineConfig more_epochs = cfg;
    more_epochs.epochs = 3;
    Pipeline retrain(more_epochs);
    CHECK(retrain.run_generate());
    CHECK(retrain.run_dataset());
    CHECK_FALSE(retrain.run_train());
    CHECK_FALSE(retrain.run_eval());

    // Changing the seed invalidates the corpus itself.
    PipelineConfig reseeded = cfg;
    reseeded.seed = 2;
    Pipeline regen(reseeded);
    CHECK_FALSE(regen.run_generate());
}

TEST_CASE("deleted downstream artifacts regenerate without retraining") {
    const auto out = fresh_dir("unfog_pipeline_regen");
    const PipelineConfig cfg = tiny_config(out);
    Pipeline(cfg).run_all();

    const std::string summary = slurp(out / "summary.txt");
    const auto grid_path = out / "grids" / "last_seen_w5.tsv";
    const std::string grid = slurp(grid_path);
    const std::string model = slurp(out / "models" / "arch1_w5.ckpt");

    std::filesystem::remove_all(out / "figures");
    std::filesystem::remove(out / "summary.txt");
    Pipeline report_only(cfg);
    CHECK(report_only.run_generate());
    CHECK(report_only.run_dataset());
    CHECK(report_only.run_train());
    CHECK(report_only.run_eval());
    CHECK_FALSE(report_only.run_report());
    CHECK(slurp(out / "summary.txt") == summary);

    std::filesystem::remove_all(out / "grids");
    Pipeline eval_only(cfg);
    CHECK(eval_only.run_train());
    CHECK_FALSE(eval_only.run_eval());
    CHECK(slurp(grid_path) == grid);
    CHECK(slurp(out / "models" / "arch1_w5.ckpt") == model);  // no retraining happened
}

TEST_CASE("tampered or missing artifacts halt with the stage named") {
    const auto out = fresh_dir("unfog_pipeline_corrupt");
    const PipelineConfig cfg = tiny_config(out);
    Pipeline(cfg).run_all();

    {
        std::ofstream patch(out / "traces" / "match_001.tsv", std::ios::app | std::ios::binary);
        patch << "tampered\n";
    }
    Pipeline after_tamper(cfg);
    CHECK_THROWS_WITH_AS(after_tamper.run_dataset(), doctest::Contains("corrupt artifact"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(after_tamper.run_dataset(), doctest::Contains("match_001.tsv"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(after_tamper.run_dataset(), doctest::Contains("generate stage stamp"),
                         std::runtime_error);

    std::filesystem::remove(out / "datasets" / "w5.tsv");
    Pipeline after_delete(cfg);
    CHECK_THROWS_WITH_AS(after_delete.run_train(), doctest::Contains("missing artifact"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(after_delete.run_train(), doctest::Contains("run the dataset stage first"),
                         std::runtime_error);
}

TEST_CASE("fixed seeds give byte-identical corpora, models, and reports") {
    const auto out_a = fresh_dir("unfog_pipeline_det_a");
    const auto out_b = fresh_dir("unfog_pipeline_det_b");
    PipelineConfig cfg_a = tiny_config(out_a);
    PipelineConfig cfg_b = tiny_config(out_b);
    Pipeline(cfg_a).run_all();
    Pipeline(cfg_b).run_all();

    for (const char* rel : {"traces/match_000.tsv", "traces/match_002.tsv", "datasets/w5.tsv",
                            "models/arch1_w5.ckpt", "grids/last_seen_w5.tsv", "grids/dnn_arch1_w5.tsv",
                            "grids/histogram_w5.tsv", "figures/dnn_arch1_w5.svg", "summary.txt"}) {
        INFO(rel);
        CHECK(slurp(out_a / rel) == slurp(out_b / rel));
    }
    // Training logs record wall-clock seconds, so they are excluded here; the
    // checkpoint equality above already pins the learned parameters.
}
