#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "unfog/train.hpp"

using namespace unfog;

namespace {

/// Hand-assembled dataset: one sequence of `rows` random in-domain rows with
/// lookback W; the target is a fixed noiseless linear read-out of the last
/// row, so a small network can drive the loss to zero.
Dataset linear_dataset(int rows, int lookback, std::uint64_t seed, int match_id = 0) {
    Dataset ds;
    ds.lookback = lookback;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int r = 0; r < rows; ++r) {
        schema::Block block{};
        for (auto& v : block) v = unit(rng);
        ds.rows.push_back(block);
        ds.row_cycles.push_back(r);
    }
    for (int k = 0; k + lookback <= rows; ++k) {
        Dataset::Sample s;
        s.first_row = k;
        const schema::Block& last = ds.rows[static_cast<std::size_t>(k + lookback - 1)];
        for (int j = 0; j < schema::kTargetWidth; ++j)
            s.target[static_cast<std::size_t>(j)] =
                0.3 * last[static_cast<std::size_t>(2 * j)] - 0.2 * last[static_cast<std::size_t>(3 * j + 1)];
        s.meta.match_id = match_id;
        s.meta.last_cycle = k + lookback - 1;
        ds.samples.push_back(s);
    }
    return ds;
}

nn::ModelSpec tiny_dnn(int lookback, std::vector<int> hidden = {48, 24}) {
    nn::ModelSpec spec;
    spec.kind = nn::ModelKind::DNN;
    spec.hidden = std::move(hidden);
    spec.lookback = lookback;
    spec.custom = true;
    return spec;
}

}  // namespace

TEST_CASE("gather_window stacks samples in index order, earliest step first") {
    const Dataset ds = linear_dataset(10, 3, 77);
    REQUIRE(ds.size() == 8);
    const std::vector<std::size_t> idx = {5, 0, 2};

    const auto window = gather_window(ds, idx);
    REQUIRE(window.size() == 3);
    for (int t = 0; t < 3; ++t) {
        CHECK(window[static_cast<std::size_t>(t)].rows() == 3);
        CHECK(window[static_cast<std::size_t>(t)].cols() == schema::kBlockWidth);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const auto& s = ds.samples[idx[r]];
            for (int c = 0; c < schema::kBlockWidth; ++c)
                CHECK(window[static_cast<std::size_t>(t)](static_cast<Eigen::Index>(r), c) ==
                      ds.rows[static_cast<std::size_t>(s.first_row + t)][static_cast<std::size_t>(c)]);
        }
    }

    const nn::Matrix targets = gather_targets(ds, idx);
    REQUIRE(targets.rows() == 3);
    REQUIRE(targets.cols() == schema::kTargetWidth);
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (int c = 0; c < schema::kTargetWidth; ++c)
            CHECK(targets(static_cast<Eigen::Index>(r), c) ==
                  ds.samples[idx[r]].target[static_cast<std::size_t>(c)]);
}

TEST_CASE("evaluate_mse is independent of batch size and weights remainders correctly") {
    const Dataset ds = linear_dataset(17, 2, 5);  // 16 samples
    nn::Network net(tiny_dnn(2), 3);

    const double full = evaluate_mse(net, ds, 256);
    CHECK(evaluate_mse(net, ds, 1) == doctest::Approx(full).epsilon(1e-12));
    CHECK(evaluate_mse(net, ds, 3) == doctest::Approx(full).epsilon(1e-12));  // 16 = 5*3 + 1
    CHECK(evaluate_mse(net, ds, 16) == doctest::Approx(full).epsilon(1e-12));

    CHECK_THROWS_AS(evaluate_mse(net, Dataset{}, 8), std::invalid_argument);
    nn::Network other(tiny_dnn(4), 3);
    CHECK_THROWS_AS(evaluate_mse(other, ds, 8), std::invalid_argument);
}

TEST_CASE("train drives a small network onto noiseless linear targets") {
    const Dataset ds = linear_dataset(26, 2, 11);  // 25 samples
    nn::Network net(tiny_dnn(2), 1);

    TrainConfig cfg;
    cfg.epochs = 500;
    cfg.batch_size = 8;
    cfg.seed = 9;
    const TrainReport report = train(net, ds, {}, cfg);

    REQUIRE(report.epochs.size() == 500);
    CHECK(report.epochs.back().train_mse < 1e-3);
    CHECK(report.epochs.back().train_mse < report.epochs.front().train_mse);
    CHECK(report.total_steps == 500 * 4);  // ceil(25 / 8) = 4 steps per epoch

    // No validation set: val_mse mirrors train_mse.
    for (const auto& e : report.epochs) CHECK(e.val_mse == e.train_mse);
}

TEST_CASE("max_steps caps the optimizer mid-epoch") {
    const Dataset ds = linear_dataset(26, 2, 11);  // 25 samples, 4 steps/epoch
    nn::Network net(tiny_dnn(2), 1);

    TrainConfig cfg;
    cfg.epochs = 100;
    cfg.batch_size = 8;
    cfg.seed = 9;
    cfg.max_steps = 7;
    const TrainReport report = train(net, ds, {}, cfg);

    CHECK(report.total_steps == 7);
    REQUIRE(report.epochs.size() == 2);  // 4 steps, then 3 more
    CHECK(report.epochs[0].steps == 4);
    CHECK(report.epochs[1].steps == 7);
}

TEST_CASE("training restores the parameters of the best validation epoch") {
    const Dataset train_set = linear_dataset(40, 2, 21, 0);
    const Dataset val_set = linear_dataset(14, 2, 22, 1);
    nn::Network net(tiny_dnn(2), 4);

    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.batch_size = 16;
    cfg.seed = 2;
    const TrainReport report = train(net, train_set, val_set, cfg);

    REQUIRE(report.best_epoch >= 0);
    CHECK(report.best_val_mse == report.epochs[static_cast<std::size_t>(report.best_epoch)].val_mse);
    for (const auto& e : report.epochs) CHECK(report.best_val_mse <= e.val_mse);

    // The restored network reproduces the best validation score exactly.
    CHECK(evaluate_mse(net, val_set) == doctest::Approx(report.best_val_mse).epsilon(1e-15));
}

TEST_CASE("training is deterministic in (network seed, shuffle seed)") {
    const Dataset train_set = linear_dataset(30, 2, 33, 0);
    const Dataset val_set = linear_dataset(10, 2, 34, 1);

    const auto run = [&] {
        nn::Network net(tiny_dnn(2), 12);
        TrainConfig cfg;
        cfg.epochs = 5;
        cfg.batch_size = 8;
        cfg.seed = 6;
        const TrainReport report = train(net, train_set, val_set, cfg);
        return std::pair{std::move(net), report};
    };

    auto [net_a, rep_a] = run();
    auto [net_b, rep_b] = run();
    REQUIRE(rep_a.epochs.size() == rep_b.epochs.size());
    for (std::size_t i = 0; i < rep_a.epochs.size(); ++i) {
        CHECK(rep_a.epochs[i].train_mse == rep_b.epochs[i].train_mse);
        CHECK(rep_a.epochs[i].val_mse == rep_b.epochs[i].val_mse);
        CHECK(rep_a.epochs[i].steps == rep_b.epochs[i].steps);
    }
    const auto pa = net_a.parameters();
    const auto pb = net_b.parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value == pb[i]->value);
}

TEST_CASE("train rejects degenerate configurations") {
    const Dataset ds = linear_dataset(10, 2, 1);
    nn::Network net(tiny_dnn(2), 1);
    TrainConfig cfg;

    CHECK_THROWS_AS(train(net, Dataset{}, {}, cfg), std::invalid_argument);

    TrainConfig bad_epochs = cfg;
    bad_epochs.epochs = 0;
    CHECK_THROWS_AS(train(net, ds, {}, bad_epochs), std::invalid_argument);

    TrainConfig bad_batch = cfg;
    bad_batch.batch_size = 0;
    CHECK_THROWS_AS(train(net, ds, {}, bad_batch), std::invalid_argument);

    nn::Network mismatched(tiny_dnn(5), 1);
    CHECK_THROWS_AS(train(mismatched, ds, {}, cfg), std::invalid_argument);
}

TEST_CASE("train log is a readable TSV with one row per epoch") {
    const Dataset ds = linear_dataset(12, 2, 8);
    nn::Network net(tiny_dnn(2, {8}), 1);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 4;
    const TrainReport report = train(net, ds, {}, cfg);

    const auto dir = std::filesystem::temp_directory_path() / "unfog_train_log";
    std::filesystem::create_directories(dir);
    const auto path = dir / "log.tsv";
    write_train_log(path, report);

    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 1 + 3 + 2);  // header, epochs, two trailer comments
    CHECK(lines[0] == "epoch\ttrain_mse\tval_mse\tsteps\tseconds");
    CHECK(lines[1].substr(0, 2) == "0\t");
    CHECK(lines[4].substr(0, 13) == "# best_epoch\t");
    CHECK(lines[5].substr(0, 15) == "# best_val_mse\t");

    std::filesystem::remove_all(dir);
}
