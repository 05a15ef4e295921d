#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "unfog/dataset.hpp"
#include "unfog/nn.hpp"

namespace unfog {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 64;
    nn::AdamParams adam;
    std::uint64_t seed = 0;
    long long max_steps = 0;  // 0 = uncapped; otherwise stop after this many optimizer steps
};

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;  // mean over the epoch's batches, scaled units
    double val_mse = 0.0;
    long long steps = 0;  // cumulative optimizer steps after this epoch
    double seconds = 0.0;  // wall time; informational only, never part of determinism checks
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_mse = std::numeric_limits<double>::infinity();
    long long total_steps = 0;
};

/// Stacks the lookback rows of the selected samples into W matrices of shape
/// batch x input width, window order earliest to latest.
std::vector<nn::Matrix> gather_window(const Dataset& ds, const std::vector<std::size_t>& sample_idx);
nn::Matrix gather_targets(const Dataset& ds, const std::vector<std::size_t>& sample_idx);

/// Forward-only MSE over a whole dataset, batched.
double evaluate_mse(nn::Network& net, const Dataset& ds, int batch_size = 256);

/// Mini-batch Adam with a seeded per-epoch shuffle. Tracks validation MSE per
/// epoch and restores the best-validation parameters before returning. An
/// empty validation set falls back to tracking the training MSE.
TrainReport train(nn::Network& net, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg);

/// One epoch row per line, tab-separated.
void write_train_log(const std::filesystem::path& path, const TrainReport& report);

}  // namespace unfog
