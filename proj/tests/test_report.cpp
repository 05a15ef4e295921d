#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "unfog/eval.hpp"
#include "unfog/report.hpp"

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

// All cell statistics are dyadic rationals, so writing, parsing, and
// re-deriving mean/stddev are exact and a rewrite must be byte-identical.
eval::ErrorGrid dyadic_grid() {
    eval::ErrorGrid grid;
    grid.add(0, 2.0, 1.0);  // bin 0: mean 2, stddev 1
    grid.add(0, 2.0, 3.0);
    grid.add(7, 42.0, 2.5);   // open bin 8: single sample, stddev 0
    grid.add(30, 17.0, 0.5);  // bin 3: mean 1, stddev 0.5
    grid.add(30, 17.0, 0.5);
    grid.add(30, 17.0, 1.5);
    grid.add(30, 17.0, 1.5);
    return grid;
}

eval::PosCountHistogram sample_histogram() {
    eval::PosCountHistogram hist;
    hist.counts[0] = 5;
    hist.counts[3] = 123456789012LL;
    hist.counts[30] = 1;
    return hist;
}

std::vector<eval::RatePoint> sample_curve() {
    // Dyadic rates so the formatted text parses back to the same double.
    return {{0, "last_seen", 0.625, 40},
            {8, "last_seen", 0.09375, 100},
            {8, "dnn_arch5_w5", 0.0703125, 100}};
}

}  // namespace

TEST_CASE("grid TSV round trip restores every cell") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_grid";
    std::filesystem::create_directories(dir);

    const eval::ErrorGrid grid = dyadic_grid();
    report::write_grid_tsv(dir / "grid.tsv", grid);
    const eval::ErrorGrid back = report::read_grid_tsv(dir / "grid.tsv");

    for (int pc = 0; pc < eval::kPosBins; ++pc)
        for (int db = 0; db < eval::kDistBins; ++db) {
            const auto& a = grid.at(pc, db);
            const auto& b = back.at(pc, db);
            CHECK(b.count == a.count);
            if (a.count) {
                CHECK(b.mean() == a.mean());
                CHECK(b.stddev() == a.stddev());
            }
        }
    CHECK(back.total() == 7);

    // Rewriting the parsed grid reproduces the file byte for byte.
    report::write_grid_tsv(dir / "grid_again.tsv", back);
    CHECK(slurp(dir / "grid_again.tsv") == slurp(dir / "grid.tsv"));

    // The header names every column and empty cells leave statistics blank.
    const std::string text = slurp(dir / "grid.tsv");
    CHECK(text.rfind("pos_count_bin\tdistance_bin_lo\tdistance_bin_hi\tcount\tmean_error_m\tstddev_m\n",
                     0) == 0);
    CHECK(text.find("\n0\t0\t5\t2\t2\t1\n") != std::string::npos);
    CHECK(text.find("\n7\t40\tinf\t1\t2.5\t0\n") != std::string::npos);
    CHECK(text.find("\n1\t0\t5\t0\t\t\n") != std::string::npos);
}

TEST_CASE("grid TSV round trip is accurate for arbitrary statistics") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_grid";
    std::filesystem::create_directories(dir);

    eval::ErrorGrid grid;
    grid.add(3, 7.0, 0.123456789);
    grid.add(3, 7.0, 2.718281828459045);
    grid.add(3, 7.0, 1.4142135623730951);
    grid.add(12, 27.5, 7.779);
    grid.add(12, 27.5, 8.881);
    grid.add(12, 27.5, 9.993);
    grid.add(12, 27.5, 3.335);
    grid.add(12, 27.5, 2.227);

    report::write_grid_tsv(dir / "awkward.tsv", grid);
    const eval::ErrorGrid back = report::read_grid_tsv(dir / "awkward.tsv");
    for (const auto [pc, db] : {std::pair{3, 1}, std::pair{12, 5}}) {
        CHECK(back.at(pc, db).count == grid.at(pc, db).count);
        CHECK(back.at(pc, db).mean() == doctest::Approx(grid.at(pc, db).mean()).epsilon(1e-12));
        CHECK(back.at(pc, db).stddev() == doctest::Approx(grid.at(pc, db).stddev()).epsilon(1e-12));
    }
}

TEST_CASE("grid TSV reader names the file and line for malformed input") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_bad";
    std::filesystem::create_directories(dir);
    const std::string header =
        "pos_count_bin\tdistance_bin_lo\tdistance_bin_hi\tcount\tmean_error_m\tstddev_m\n";

    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "missing.tsv"),
                         doctest::Contains("cannot open"), std::runtime_error);

    spill(dir / "empty.tsv", "");
    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "empty.tsv"),
                         doctest::Contains("empty grid file"), std::runtime_error);

    spill(dir / "short.tsv", header + "0\t0\t5\t1\n");
    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "short.tsv"),
                         doctest::Contains("expected 6 columns"), std::runtime_error);
    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "short.tsv"), doctest::Contains("short.tsv:2"),
                         std::runtime_error);

    spill(dir / "dup.tsv", header + "0\t0\t5\t1\t2\t0\n0\t0\t5\t1\t2\t0\n");
    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "dup.tsv"), doctest::Contains("duplicate cell"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "dup.tsv"), doctest::Contains("dup.tsv:3"),
                         std::runtime_error);

    spill(dir / "range.tsv", header + "31\t0\t5\t1\t2\t0\n");
    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "range.tsv"),
                         doctest::Contains("pos_count_bin out of range"), std::runtime_error);

    spill(dir / "nonnum.tsv", header + "0\t0\t5\tmany\t2\t0\n");
    CHECK_THROWS_WITH_AS(report::read_grid_tsv(dir / "nonnum.tsv"), doctest::Contains("nonnum.tsv:2"),
                         std::runtime_error);
}

TEST_CASE("err_sub TSV round trip keeps suppressed cells missing") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_errsub";
    std::filesystem::create_directories(dir);

    eval::ErrSubGrid grid;
    grid.diff[2][3] = 0.75;
    grid.diff[5][8] = -1.25;
    grid.diff[0][0] = 0.0;  // a defined zero must survive, not turn missing

    report::write_errsub_tsv(dir / "errsub.tsv", grid);
    const eval::ErrSubGrid back = report::read_errsub_tsv(dir / "errsub.tsv");

    int defined = 0;
    for (int pc = 0; pc < eval::kPosBins; ++pc)
        for (int db = 0; db < eval::kDistBins; ++db) {
            CHECK(back.at(pc, db).has_value() == grid.at(pc, db).has_value());
            if (grid.at(pc, db)) {
                CHECK(*back.at(pc, db) == *grid.at(pc, db));
                ++defined;
            }
        }
    CHECK(defined == 3);

    report::write_errsub_tsv(dir / "errsub_again.tsv", back);
    CHECK(slurp(dir / "errsub_again.tsv") == slurp(dir / "errsub.tsv"));

    spill(dir / "short.tsv", "pos_count_bin\tdistance_bin_lo\tdistance_bin_hi\terr_sub_m\n0\t0\t5\n");
    CHECK_THROWS_WITH_AS(report::read_errsub_tsv(dir / "short.tsv"),
                         doctest::Contains("expected 4 columns"), std::runtime_error);
}

TEST_CASE("histogram TSV round trip is exact") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_hist";
    std::filesystem::create_directories(dir);

    const eval::PosCountHistogram hist = sample_histogram();
    report::write_histogram_tsv(dir / "hist.tsv", hist);
    const eval::PosCountHistogram back = report::read_histogram_tsv(dir / "hist.tsv");
    CHECK(back.counts == hist.counts);
    CHECK(back.total() == hist.total());

    report::write_histogram_tsv(dir / "hist_again.tsv", back);
    CHECK(slurp(dir / "hist_again.tsv") == slurp(dir / "hist.tsv"));

    spill(dir / "range.tsv", "pos_count\tcount\n31\t4\n");
    CHECK_THROWS_WITH_AS(report::read_histogram_tsv(dir / "range.tsv"),
                         doctest::Contains("pos_count out of range"), std::runtime_error);
    spill(dir / "wide.tsv", "pos_count\tcount\n3\t4\t5\n");
    CHECK_THROWS_WITH_AS(report::read_histogram_tsv(dir / "wide.tsv"),
                         doctest::Contains("expected 2 columns"), std::runtime_error);
}

TEST_CASE("rate curve TSV round trip keeps methods and the open bin") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_curve";
    std::filesystem::create_directories(dir);

    const std::vector<eval::RatePoint> curve = sample_curve();
    report::write_curve_tsv(dir / "curve.tsv", curve);

    const std::string text = slurp(dir / "curve.tsv");
    CHECK(text.rfind("distance_bin_lo\tdistance_bin_hi\tdistance_center\tmethod\tcount\trate\n", 0) ==
          0);
    CHECK(text.find("40\tinf\t42.5\tlast_seen\t100\t0.09375\n") != std::string::npos);

    const std::vector<eval::RatePoint> back = report::read_curve_tsv(dir / "curve.tsv");
    REQUIRE(back.size() == curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(back[i].bin == curve[i].bin);
        CHECK(back[i].method == curve[i].method);
        CHECK(back[i].count == curve[i].count);
        CHECK(back[i].rate == curve[i].rate);
    }

    report::write_curve_tsv(dir / "curve_again.tsv", back);
    CHECK(slurp(dir / "curve_again.tsv") == slurp(dir / "curve.tsv"));

    spill(dir / "short.tsv",
          "distance_bin_lo\tdistance_bin_hi\tdistance_center\tmethod\tcount\trate\n0\t5\t2.5\tx\t1\n");
    CHECK_THROWS_WITH_AS(report::read_curve_tsv(dir / "short.tsv"),
                         doctest::Contains("expected 6 columns"), std::runtime_error);
}

TEST_CASE("SVG renderers emit identical bytes for identical input") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_svg";
    std::filesystem::create_directories(dir);

    const eval::ErrorGrid grid = dyadic_grid();
    eval::ErrSubGrid errsub;
    errsub.diff[2][3] = 0.75;
    errsub.diff[5][8] = -1.25;
    const eval::PosCountHistogram hist = sample_histogram();
    const std::vector<eval::RatePoint> curve = sample_curve();

    report::render_grid_heatmap_svg(dir / "grid_a.svg", grid, "mean error (m)");
    report::render_grid_heatmap_svg(dir / "grid_b.svg", grid, "mean error (m)");
    report::render_errsub_heatmap_svg(dir / "sub_a.svg", errsub, "err_sub");
    report::render_errsub_heatmap_svg(dir / "sub_b.svg", errsub, "err_sub");
    report::render_histogram_svg(dir / "hist_a.svg", hist, "pos counts");
    report::render_histogram_svg(dir / "hist_b.svg", hist, "pos counts");
    report::render_curves_svg(dir / "curve_a.svg", curve, "error over distance");
    report::render_curves_svg(dir / "curve_b.svg", curve, "error over distance");

    for (const char* name : {"grid", "sub", "hist", "curve"}) {
        const std::string a = slurp(dir / (std::string(name) + "_a.svg"));
        CHECK(a == slurp(dir / (std::string(name) + "_b.svg")));
        CHECK(a.rfind("<?xml", 0) == 0);
        CHECK(a.substr(a.size() - 7) == "</svg>\n");
    }

    const std::string grid_svg = slurp(dir / "grid_a.svg");
    CHECK(grid_svg.find("mean error (m)") != std::string::npos);
    CHECK(grid_svg.find("#bdbdbd") != std::string::npos);  // empty cells get the missing fill
    CHECK(grid_svg.find("pos count") != std::string::npos);
    CHECK(grid_svg.find("observer-subject distance (m)") != std::string::npos);

    CHECK(slurp(dir / "sub_a.svg").find("(first better)") != std::string::npos);

    const std::string curve_svg = slurp(dir / "curve_a.svg");
    CHECK(curve_svg.find("last_seen") != std::string::npos);
    CHECK(curve_svg.find("dnn_arch5_w5") != std::string::npos);
    CHECK(curve_svg.find("error / distance") != std::string::npos);

    // A grid parsed back from its table renders the same figure.
    report::write_grid_tsv(dir / "grid.tsv", grid);
    report::render_grid_heatmap_svg(dir / "grid_c.svg", report::read_grid_tsv(dir / "grid.tsv"),
                                    "mean error (m)");
    CHECK(slurp(dir / "grid_c.svg") == grid_svg);
}

TEST_CASE("summary lists per-method overall and stale statistics") {
    const auto dir = std::filesystem::temp_directory_path() / "unfog_report_summary";
    std::filesystem::create_directories(dir);

    report::MethodSummary seen;
    seen.name = "last_seen";
    seen.overall.add(1.0);
    seen.overall.add(3.0);
    seen.stale_region.add(2.5);

    report::MethodSummary dnn;
    dnn.name = "dnn_arch5_w5";
    dnn.overall.add(0.5);
    dnn.overall.add(1.5);
    // no stale samples: the stale columns stay blank

    report::write_summary(dir / "summary.txt", "matches=50 lookback=5", {seen, dnn}, 3);

    const std::string want =
        "prediction error summary\n"
        "========================\n"
        "\n"
        "config: matches=50 lookback=5\n"
        "\n"
        "method\tsamples\tmean_error_m\tstale_samples\tstale_mean_error_m\n"
        "last_seen\t2\t2\t1\t2.5\n"
        "dnn_arch5_w5\t2\t1\t0\t\n"
        "\n"
        "stale region: cells with pos count >= 3\n";
    CHECK(slurp(dir / "summary.txt") == want);
}
