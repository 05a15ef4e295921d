#include "unfog/train.hpp"

#include <chrono>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "unfog/rng.hpp"
#include "unfog/textio.hpp"

namespace unfog {

std::vector<nn::Matrix> gather_window(const Dataset& ds, const std::vector<std::size_t>& sample_idx) {
    const int w = ds.lookback;
    const auto batch = static_cast<Eigen::Index>(sample_idx.size());
    std::vector<nn::Matrix> window(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) {
        nn::Matrix& x = window[static_cast<std::size_t>(t)];
        x.resize(batch, schema::kBlockWidth);
        for (Eigen::Index r = 0; r < batch; ++r) {
            const auto& s = ds.samples[sample_idx[static_cast<std::size_t>(r)]];
            x.row(r) = Eigen::Map<const Eigen::RowVectorXd>(ds.input_row(s, t), schema::kBlockWidth);
        }
    }
    return window;
}

nn::Matrix gather_targets(const Dataset& ds, const std::vector<std::size_t>& sample_idx) {
    const auto batch = static_cast<Eigen::Index>(sample_idx.size());
    nn::Matrix y(batch, schema::kTargetWidth);
    for (Eigen::Index r = 0; r < batch; ++r) {
        const auto& s = ds.samples[sample_idx[static_cast<std::size_t>(r)]];
        y.row(r) = Eigen::Map<const Eigen::RowVectorXd>(s.target.data(), schema::kTargetWidth);
    }
    return y;
}

double evaluate_mse(nn::Network& net, const Dataset& ds, int batch_size) {
    if (ds.samples.empty()) throw std::invalid_argument("evaluate_mse: empty dataset");
    if (ds.lookback != net.spec().lookback)
        throw std::invalid_argument("evaluate_mse: dataset lookback " + std::to_string(ds.lookback) +
                                    " does not match model lookback " + std::to_string(net.spec().lookback));
    double sum = 0.0;
    std::size_t done = 0;
    std::vector<std::size_t> idx;
    while (done < ds.samples.size()) {
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(batch_size),
                                                       ds.samples.size() - done);
        idx.resize(take);
        std::iota(idx.begin(), idx.end(), done);
        const auto window = gather_window(ds, idx);
        const auto targets = gather_targets(ds, idx);
        sum += nn::mse_loss(net.forward(window), targets) * static_cast<double>(take);
        done += take;
    }
    return sum / static_cast<double>(ds.samples.size());
}

TrainReport train(nn::Network& net, const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg) {
    if (train_set.samples.empty()) throw std::invalid_argument("train: empty training split");
    if (train_set.lookback != net.spec().lookback)
        throw std::invalid_argument("train: dataset lookback " + std::to_string(train_set.lookback) +
                                    " does not match model lookback " + std::to_string(net.spec().lookback));
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");

    auto params = net.parameters();
    nn::Adam adam(params, cfg.adam);

    TrainReport report;
    std::vector<nn::Matrix> best_values;
    long long steps = 0;
    bool capped = false;

    std::vector<std::size_t> order(train_set.samples.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs && !capped; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        auto rng = seeded_rng(cfg.seed, {"epoch", std::to_string(epoch)});
        shuffle(order, rng);

        double loss_sum = 0.0;
        std::size_t seen = 0;
        std::vector<std::size_t> batch;
        for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                                           order.size() - at);
            batch.assign(order.begin() + static_cast<std::ptrdiff_t>(at),
                         order.begin() + static_cast<std::ptrdiff_t>(at + take));
            const auto window = gather_window(train_set, batch);
            const auto targets = gather_targets(train_set, batch);

            net.zero_grad();
            const nn::Matrix out = net.forward(window);
            loss_sum += nn::mse_loss(out, targets) * static_cast<double>(take);
            seen += take;
            net.backward(nn::mse_grad(out, targets));
            adam.step(params);
            ++steps;
            if (cfg.max_steps > 0 && steps >= cfg.max_steps) {
                capped = true;
                break;
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = loss_sum / static_cast<double>(seen);
        stats.val_mse = val_set.samples.empty() ? stats.train_mse : evaluate_mse(net, val_set);
        stats.steps = steps;
        stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        report.epochs.push_back(stats);

        if (stats.val_mse < report.best_val_mse) {
            report.best_val_mse = stats.val_mse;
            report.best_epoch = epoch;
            best_values.clear();
            for (const nn::Tensor* t : params) best_values.push_back(t->value);
        }
    }

    report.total_steps = steps;
    if (!best_values.empty())
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
    return report;
}

void write_train_log(const std::filesystem::path& path, const TrainReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "epoch\ttrain_mse\tval_mse\tsteps\tseconds\n";
    for (const auto& e : report.epochs)
        out << e.epoch << "\t" << textio::format_double(e.train_mse) << "\t"
            << textio::format_double(e.val_mse) << "\t" << e.steps << "\t"
            << textio::format_double(e.seconds) << "\n";
    out << "# best_epoch\t" << report.best_epoch << "\n";
    out << "# best_val_mse\t" << textio::format_double(report.best_val_mse) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace unfog
