#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "unfog/dataset.hpp"
#include "unfog/sensor.hpp"

namespace unfog {

/// Everything the pipeline stages need, collected from a key=value config
/// file and/or command-line overrides.
struct PipelineConfig {
    int matches = 50;
    int cycles_per_match = 6000;
    double view_width = 60.0;
    double max_visible_distance = 60.0;
    std::string neck_policy = "rotating_scan";
    std::uint64_t seed = 1;
    std::vector<int> lookbacks = {5};
    std::vector<int> architectures = {5, 7};
    SplitFractions split;
    int epochs = 20;
    int batch_size = 64;
    long long max_steps = 0;  // optional cap on optimizer steps per model, 0 = none
    int subject = 5;          // scored opponent uniform number
    bool all_opponents = false;
    bool allow_custom = false;  // lifts the lookback whitelist
    int jobs = 1;
    std::filesystem::path output_dir = "out";

    ViewConfig view_config() const;
    /// Stable key=value text (one per line, fixed order, no output_dir);
    /// echoed into summary.txt and hashed into stage stamps.
    std::string canonical() const;
};

/// Reads a key=value file. Unknown keys, unparsable values and malformed
/// lines are errors. Does not cross-validate; call validate_config after
/// applying any command-line overrides.
PipelineConfig parse_config_file(const std::filesystem::path& path);

/// Applies one key=value pair (same key set as the config file).
void apply_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);

void validate_config(const PipelineConfig& cfg);

/// FNV-1a 64 over the file's bytes.
std::uint64_t hash_file(const std::filesystem::path& path);

/// Orchestrates generate -> dataset -> train -> eval -> report with
/// content-hash memoization: a stage is skipped when its recorded input key
/// matches and all of its outputs are still intact on disk.
class Pipeline {
  public:
    explicit Pipeline(PipelineConfig cfg);

    /// Each stage returns true when it was skipped as up to date.
    bool run_generate();
    bool run_dataset();
    bool run_train();
    bool run_eval();
    bool run_report();
    void run_all();

    const PipelineConfig& config() const { return cfg_; }

    std::filesystem::path trace_path(int match_id) const;
    std::filesystem::path dataset_path(int lookback) const;
    std::filesystem::path model_path(int arch, int lookback) const;
    std::filesystem::path train_log_path(int arch, int lookback) const;

  private:
    struct Stamp {
        std::uint64_t key = 0;
        std::vector<std::pair<std::uint64_t, std::filesystem::path>> outputs;
    };

    std::filesystem::path stamp_path(const std::string& stage) const;
    std::optional<Stamp> read_stamp(const std::string& stage) const;
    void write_stamp(const std::string& stage, const Stamp& stamp) const;
    bool stage_up_to_date(const std::string& stage, std::uint64_t key) const;
    /// Inputs produced by an upstream stage must still match that stage's
    /// stamp; a mismatch means the artifact was corrupted or hand-edited.
    void check_artifact(const std::string& producer_stage, const std::filesystem::path& path) const;

    PipelineConfig cfg_;
};

}  // namespace unfog
