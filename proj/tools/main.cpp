#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "unfog/nn.hpp"
#include "unfog/pipeline.hpp"
#include "unfog/rng.hpp"
#include "unfog/textio.hpp"
#include "unfog/train.hpp"

namespace {

using namespace unfog;

/// Trains one catalog model on an existing dataset file, outside the staged
/// pipeline (no stamps, no directory layout).
int train_standalone(const PipelineConfig& cfg, int arch, int lookback, const std::string& data_path,
                     std::string ckpt_path) {
    if (arch < 1 || lookback < 1)
        throw std::runtime_error("standalone training needs --arch and --lookback");
    if (ckpt_path.empty())
        throw std::runtime_error("standalone training needs --save CKPT");

    const Dataset full = read_dataset(data_path);
    if (full.lookback != lookback)
        throw std::runtime_error("dataset " + data_path + " has lookback " + std::to_string(full.lookback) +
                                 ", flag says " + std::to_string(lookback));
    const DatasetSplit split = split_by_match(full, cfg.split, cfg.seed);
    std::cout << "train: " << split.train.size() << " train / " << split.validation.size() << " val / "
              << split.test.size() << " test samples\n";

    const std::string tag = "arch" + std::to_string(arch) + "_w" + std::to_string(lookback);
    auto seed_rng = seeded_rng(cfg.seed, {"train", tag});
    const std::uint64_t model_seed = seed_rng();
    nn::Network net(nn::table_spec(arch, lookback), model_seed);

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.seed = model_seed;
    tc.max_steps = cfg.max_steps;
    const TrainReport report = train(net, split.train, split.validation, tc);

    const std::filesystem::path ckpt{ckpt_path};
    net.save(ckpt, static_cast<std::uint64_t>(report.total_steps));
    const auto log = ckpt.parent_path() / (ckpt.stem().string() + "_log.tsv");
    write_train_log(log, report);
    std::cout << "train: " << tag << ": best val mse " << textio::format_double(report.best_val_mse)
              << " (epoch " << report.best_epoch << ") -> " << ckpt.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthesizes partially observed matches, trains opponent-position predictors, "
                 "and reports their error grids"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);

    std::map<std::string, std::string> overrides;
    auto add_override = [&app, &overrides](const std::string& flag, const std::string& key,
                                           const std::string& help) {
        app.add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };
    add_override("--seed", "seed", "base random seed");
    add_override("--jobs", "jobs", "concurrency cap (stages currently run with one worker)");
    add_override("--out", "output_dir", "artifact directory (default: out)");
    add_override("--matches", "matches", "matches to synthesize");
    add_override("--cycles", "cycles_per_match", "cycles per match");
    add_override("--lookbacks", "lookbacks", "comma-separated window lengths, e.g. 5,10,15");
    add_override("--architectures", "architectures", "comma-separated catalog ids, e.g. 5,7");
    add_override("--epochs", "epochs", "training epochs");
    add_override("--batch-size", "batch_size", "minibatch size");
    add_override("--max-steps", "max_steps", "cap on optimizer steps per model (0 = uncapped)");
    add_override("--split", "split", "train,validation,test match fractions");
    add_override("--subject", "subject", "scored opponent uniform number (1-11)");
    add_override("--all-opponents", "all_opponents", "score all 11 opponents (true/false)");
    add_override("--allow-custom", "allow_custom", "permit non-catalog lookbacks and view widths");
    add_override("--view-width", "view_width", "view cone width in degrees (60, 120, 180)");
    add_override("--max-visible-distance", "max_visible_distance", "player/ball visibility range (m)");
    add_override("--neck-policy", "neck_policy", "rotating_scan or ball_focused");

    auto* cmd_generate = app.add_subcommand("generate", "synthesize match traces");
    auto* cmd_dataset = app.add_subcommand("dataset", "build window datasets from traces");
    auto* cmd_train = app.add_subcommand("train", "train the configured architecture grid");
    auto* cmd_eval = app.add_subcommand("eval", "score predictors on the test split");
    auto* cmd_report = app.add_subcommand("report", "render figures and the summary");
    auto* cmd_all = app.add_subcommand("all", "run generate, dataset, train, eval, report");

    int arch_flag = 0;
    int lookback_flag = 0;
    std::string data_path;
    std::string ckpt_path;
    cmd_train->add_option("--arch", arch_flag, "catalog architecture id (1-9)");
    cmd_train->add_option("--lookback", lookback_flag, "window length");
    cmd_train->add_option("--data", data_path, "standalone mode: train on this dataset file")
        ->check(CLI::ExistingFile);
    cmd_train->add_option("--save", ckpt_path, "standalone mode: checkpoint output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : parse_config_file(config_path);
        for (const auto& [key, value] : overrides) apply_config_value(cfg, key, value);
        if (cmd_train->parsed()) {
            if (arch_flag) cfg.architectures = {arch_flag};
            if (lookback_flag) cfg.lookbacks = {lookback_flag};
        }
        validate_config(cfg);

        if (cmd_train->parsed() && !data_path.empty())
            return train_standalone(cfg, arch_flag, lookback_flag, data_path, ckpt_path);

        Pipeline pipeline(cfg);
        if (cmd_generate->parsed()) pipeline.run_generate();
        else if (cmd_dataset->parsed()) pipeline.run_dataset();
        else if (cmd_train->parsed()) pipeline.run_train();
        else if (cmd_eval->parsed()) pipeline.run_eval();
        else if (cmd_report->parsed()) pipeline.run_report();
        else if (cmd_all->parsed()) pipeline.run_all();
        return 0;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
