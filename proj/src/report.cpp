#include "unfog/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "unfog/textio.hpp"

namespace unfog::report {

namespace {

using eval::kDistBins;
using eval::kPosBins;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line_no, const std::string& what) {
    std::ostringstream os;
    os << path.string() << ":" << line_no << ": " << what;
    throw std::runtime_error(os.str());
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::string format_hi(double hi) {
    return std::isinf(hi) ? std::string("inf") : textio::format_double(hi);
}

double parse_hi(std::string_view s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return textio::parse_double(s);
}

std::string fixed2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct Rgb {
    int r = 0, g = 0, b = 0;
};

std::string hex(const Rgb& c) {
    char buf[10];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto mix = [t](int x, int y) { return static_cast<int>(std::lround(x + t * (y - x))); };
    return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

const Rgb kWhite{255, 255, 255};
const Rgb kDarkRed{165, 15, 21};
const Rgb kGreen{35, 132, 67};
const Rgb kRed{202, 0, 32};
constexpr const char* kMissingFill = "#bdbdbd";

std::string method_color(const std::string& method, std::size_t index) {
    // matches the convention used throughout: blue for the last-seen
    // baseline, green for dense models, red for recurrent models
    if (method.find("last_seen") != std::string::npos) return "#1f77b4";
    if (method.find("dnn") != std::string::npos) return "#2ca02c";
    if (method.find("lstm") != std::string::npos) return "#d62728";
    if (method.find("velocity") != std::string::npos) return "#ff7f0e";
    static const char* fallback[] = {"#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return fallback[index % 4];
}

class Svg {
  public:
    Svg(int width, int height) : w_(width), h_(height) {
        os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
            << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
        os_ << "<rect x=\"0\" y=\"0\" width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& extra = {}) {
        os_ << "<rect x=\"" << fixed2(x) << "\" y=\"" << fixed2(y) << "\" width=\"" << fixed2(w)
            << "\" height=\"" << fixed2(h) << "\" fill=\"" << fill << "\"" << extra << "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
        os_ << "<line x1=\"" << fixed2(x1) << "\" y1=\"" << fixed2(y1) << "\" x2=\"" << fixed2(x2)
            << "\" y2=\"" << fixed2(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fixed2(width)
            << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 11, const std::string& anchor = "start",
              const std::string& extra = {}) {
        os_ << "<text x=\"" << fixed2(x) << "\" y=\"" << fixed2(y) << "\" font-family=\"sans-serif\" font-size=\""
            << size << "\" text-anchor=\"" << anchor << "\"" << extra << ">" << s << "</text>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
        os_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) os_ << " ";
            os_ << fixed2(pts[i].first) << "," << fixed2(pts[i].second);
        }
        os_ << "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string& fill) {
        os_ << "<circle cx=\"" << fixed2(x) << "\" cy=\"" << fixed2(y) << "\" r=\"" << fixed2(r)
            << "\" fill=\"" << fill << "\"/>\n";
    }

    void save(const std::filesystem::path& path) {
        os_ << "</svg>\n";
        auto out = open_out(path);
        out << os_.str();
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }

  private:
    int w_, h_;
    std::ostringstream os_;
};

// Shared heatmap layout: distance bins across, pos counts down.
constexpr double kCellW = 46.0;
constexpr double kCellH = 15.0;
constexpr double kPlotX = 70.0;
constexpr double kPlotY = 56.0;

void heatmap_axes(Svg& svg, const std::string& title) {
    svg.text(kPlotX + kCellW * kDistBins / 2.0, 24, title, 13, "middle");
    svg.text(kPlotX + kCellW * kDistBins / 2.0, kPlotY + kCellH * kPosBins + 36,
             "observer-subject distance (m)", 11, "middle");
    for (int db = 0; db < kDistBins; ++db) {
        std::ostringstream label;
        if (db == kDistBins - 1) label << "40+";
        else label << 5 * db << "-" << 5 * (db + 1);
        svg.text(kPlotX + kCellW * (db + 0.5), kPlotY + kCellH * kPosBins + 16, label.str(), 9, "middle");
    }
    svg.text(18, kPlotY + kCellH * kPosBins / 2.0, "pos count", 11, "middle",
             " transform=\"rotate(-90 18 " + fixed2(kPlotY + kCellH * kPosBins / 2.0) + ")\"");
    for (int pc = 0; pc < kPosBins; pc += 5)
        svg.text(kPlotX - 8, kPlotY + kCellH * (pc + 0.7), std::to_string(pc), 9, "end");
}

}  // namespace

void write_grid_tsv(const std::filesystem::path& path, const eval::ErrorGrid& grid) {
    auto out = open_out(path);
    out << "pos_count_bin\tdistance_bin_lo\tdistance_bin_hi\tcount\tmean_error_m\tstddev_m\n";
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) {
            const auto& cell = grid.at(pc, db);
            out << pc << "\t" << textio::format_double(eval::distance_bin_lo(db)) << "\t"
                << format_hi(eval::distance_bin_hi(db)) << "\t" << cell.count << "\t";
            if (cell.count) out << textio::format_double(cell.mean()) << "\t"
                               << textio::format_double(cell.stddev());
            else out << "\t";
            out << "\n";
        }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

eval::ErrorGrid read_grid_tsv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty grid file");
    eval::ErrorGrid grid;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto sv = textio::chomp(line);
        if (sv.empty()) continue;
        auto fields = textio::split(sv, '\t');
        if (fields.size() != 6) fail(path, line_no, "expected 6 columns");
        try {
            const int pc = static_cast<int>(textio::parse_int(fields[0]));
            const int db = eval::distance_bin(textio::parse_double(fields[1]));
            const long long count = textio::parse_int(fields[3]);
            if (pc < 0 || pc >= kPosBins) throw std::runtime_error("pos_count_bin out of range");
            auto& cell = grid.cells[static_cast<std::size_t>(pc)][static_cast<std::size_t>(db)];
            if (cell.count) throw std::runtime_error("duplicate cell");
            if (count) {
                const double mean = textio::parse_double(fields[4]);
                const double sd = textio::parse_double(fields[5]);
                cell.count = count;
                cell.sum = mean * static_cast<double>(count);
                cell.sumsq = (sd * sd + mean * mean) * static_cast<double>(count);
            }
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
    }
    return grid;
}

void write_errsub_tsv(const std::filesystem::path& path, const eval::ErrSubGrid& grid) {
    auto out = open_out(path);
    out << "pos_count_bin\tdistance_bin_lo\tdistance_bin_hi\terr_sub_m\n";
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) {
            out << pc << "\t" << textio::format_double(eval::distance_bin_lo(db)) << "\t"
                << format_hi(eval::distance_bin_hi(db)) << "\t";
            const auto& v = grid.at(pc, db);
            if (v) out << textio::format_double(*v);
            out << "\n";
        }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

eval::ErrSubGrid read_errsub_tsv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty err_sub file");
    eval::ErrSubGrid grid;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto sv = textio::chomp(line);
        if (sv.empty()) continue;
        auto fields = textio::split(sv, '\t');
        if (fields.size() != 4) fail(path, line_no, "expected 4 columns");
        try {
            const int pc = static_cast<int>(textio::parse_int(fields[0]));
            const int db = eval::distance_bin(textio::parse_double(fields[1]));
            if (pc < 0 || pc >= kPosBins) throw std::runtime_error("pos_count_bin out of range");
            if (!fields[3].empty())
                grid.diff[static_cast<std::size_t>(pc)][static_cast<std::size_t>(db)] =
                    textio::parse_double(fields[3]);
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
    }
    return grid;
}

void write_histogram_tsv(const std::filesystem::path& path, const eval::PosCountHistogram& hist) {
    auto out = open_out(path);
    out << "pos_count\tcount\n";
    for (int pc = 0; pc < kPosBins; ++pc)
        out << pc << "\t" << hist.counts[static_cast<std::size_t>(pc)] << "\n";
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

eval::PosCountHistogram read_histogram_tsv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty histogram file");
    eval::PosCountHistogram hist;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto sv = textio::chomp(line);
        if (sv.empty()) continue;
        auto fields = textio::split(sv, '\t');
        if (fields.size() != 2) fail(path, line_no, "expected 2 columns");
        try {
            const int pc = static_cast<int>(textio::parse_int(fields[0]));
            if (pc < 0 || pc >= kPosBins) throw std::runtime_error("pos_count out of range");
            hist.counts[static_cast<std::size_t>(pc)] = textio::parse_int(fields[1]);
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
    }
    return hist;
}

void write_curve_tsv(const std::filesystem::path& path, const std::vector<eval::RatePoint>& curve) {
    auto out = open_out(path);
    out << "distance_bin_lo\tdistance_bin_hi\tdistance_center\tmethod\tcount\trate\n";
    for (const auto& p : curve)
        out << textio::format_double(eval::distance_bin_lo(p.bin)) << "\t"
            << format_hi(eval::distance_bin_hi(p.bin)) << "\t"
            << textio::format_double(eval::distance_bin_center(p.bin)) << "\t" << p.method << "\t" << p.count
            << "\t" << textio::format_double(p.rate) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<eval::RatePoint> read_curve_tsv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty curve file");
    std::vector<eval::RatePoint> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto sv = textio::chomp(line);
        if (sv.empty()) continue;
        auto fields = textio::split(sv, '\t');
        if (fields.size() != 6) fail(path, line_no, "expected 6 columns");
        try {
            eval::RatePoint p;
            p.bin = eval::distance_bin(textio::parse_double(fields[0]));
            parse_hi(fields[1]);
            p.method = std::string(fields[3]);
            p.count = textio::parse_int(fields[4]);
            p.rate = textio::parse_double(fields[5]);
            out.push_back(p);
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
    }
    return out;
}

void render_grid_heatmap_svg(const std::filesystem::path& path, const eval::ErrorGrid& grid,
                             const std::string& title) {
    double vmax = 0.0;
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db)
            if (grid.at(pc, db).count) vmax = std::max(vmax, grid.at(pc, db).mean());
    if (vmax <= 0.0) vmax = 1.0;

    const int width = static_cast<int>(kPlotX + kCellW * kDistBins + 130);
    const int height = static_cast<int>(kPlotY + kCellH * kPosBins + 70);
    Svg svg(width, height);
    heatmap_axes(svg, title);
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) {
            const auto& cell = grid.at(pc, db);
            const std::string fill =
                cell.count ? hex(lerp(kWhite, kDarkRed, cell.mean() / vmax)) : kMissingFill;
            svg.rect(kPlotX + kCellW * db, kPlotY + kCellH * pc, kCellW - 1, kCellH - 1, fill);
        }
    // legend: vertical scale from 0 at the bottom to vmax at the top
    const double lx = kPlotX + kCellW * kDistBins + 24;
    for (int i = 0; i < 60; ++i) {
        const double t = 1.0 - static_cast<double>(i) / 59.0;
        svg.rect(lx, kPlotY + i * 3.0, 16, 3.2, hex(lerp(kWhite, kDarkRed, t)));
    }
    svg.text(lx + 22, kPlotY + 8, fixed2(vmax) + " m", 9);
    svg.text(lx + 22, kPlotY + 182, "0 m", 9);
    svg.rect(lx, kPlotY + 192, 12, 12, kMissingFill);
    svg.text(lx + 18, kPlotY + 202, "no data", 9);
    svg.save(path);
}

void render_errsub_heatmap_svg(const std::filesystem::path& path, const eval::ErrSubGrid& grid,
                               const std::string& title) {
    double vmax = 0.0;
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db)
            if (grid.at(pc, db)) vmax = std::max(vmax, std::abs(*grid.at(pc, db)));
    if (vmax <= 0.0) vmax = 1.0;

    const int width = static_cast<int>(kPlotX + kCellW * kDistBins + 130);
    const int height = static_cast<int>(kPlotY + kCellH * kPosBins + 70);
    Svg svg(width, height);
    heatmap_axes(svg, title);
    for (int pc = 0; pc < kPosBins; ++pc)
        for (int db = 0; db < kDistBins; ++db) {
            const auto& v = grid.at(pc, db);
            std::string fill = kMissingFill;
            if (v) fill = *v >= 0.0 ? hex(lerp(kWhite, kGreen, *v / vmax))
                                    : hex(lerp(kWhite, kRed, -*v / vmax));
            svg.rect(kPlotX + kCellW * db, kPlotY + kCellH * pc, kCellW - 1, kCellH - 1, fill);
        }
    const double lx = kPlotX + kCellW * kDistBins + 24;
    for (int i = 0; i < 60; ++i) {
        const double t = 1.0 - 2.0 * static_cast<double>(i) / 59.0;  // +vmax at the top
        const std::string fill =
            t >= 0.0 ? hex(lerp(kWhite, kGreen, t)) : hex(lerp(kWhite, kRed, -t));
        svg.rect(lx, kPlotY + i * 3.0, 16, 3.2, fill);
    }
    svg.text(lx + 22, kPlotY + 8, "+" + fixed2(vmax) + " m (first better)", 9);
    svg.text(lx + 22, kPlotY + 96, "0", 9);
    svg.text(lx + 22, kPlotY + 182, "-" + fixed2(vmax) + " m", 9);
    svg.rect(lx, kPlotY + 192, 12, 12, kMissingFill);
    svg.text(lx + 18, kPlotY + 202, "no data", 9);
    svg.save(path);
}

void render_histogram_svg(const std::filesystem::path& path, const eval::PosCountHistogram& hist,
                          const std::string& title) {
    const double plot_x = 70, plot_y = 48, plot_w = 560, plot_h = 280;
    long long vmax = 1;
    for (long long c : hist.counts) vmax = std::max(vmax, c);

    Svg svg(static_cast<int>(plot_x + plot_w + 40), static_cast<int>(plot_y + plot_h + 70));
    svg.text(plot_x + plot_w / 2, 24, title, 13, "middle");
    svg.line(plot_x, plot_y + plot_h, plot_x + plot_w, plot_y + plot_h, "#333333");
    svg.line(plot_x, plot_y, plot_x, plot_y + plot_h, "#333333");
    const double bar_w = plot_w / kPosBins;
    for (int pc = 0; pc < kPosBins; ++pc) {
        const double h = plot_h * static_cast<double>(hist.counts[static_cast<std::size_t>(pc)]) /
                         static_cast<double>(vmax);
        svg.rect(plot_x + bar_w * pc + 1, plot_y + plot_h - h, bar_w - 2, h, "#1f77b4");
        if (pc % 5 == 0)
            svg.text(plot_x + bar_w * (pc + 0.5), plot_y + plot_h + 16, std::to_string(pc), 9, "middle");
    }
    for (int i = 0; i <= 4; ++i) {
        const double frac = static_cast<double>(i) / 4.0;
        const double y = plot_y + plot_h * (1.0 - frac);
        svg.line(plot_x - 4, y, plot_x, y, "#333333");
        svg.text(plot_x - 8, y + 3, std::to_string(static_cast<long long>(std::llround(frac * vmax))), 9,
                 "end");
    }
    svg.text(plot_x + plot_w / 2, plot_y + plot_h + 40, "pos count", 11, "middle");
    svg.text(20, plot_y + plot_h / 2, "samples", 11, "middle",
             " transform=\"rotate(-90 20 " + fixed2(plot_y + plot_h / 2) + ")\"");
    svg.save(path);
}

void render_curves_svg(const std::filesystem::path& path, const std::vector<eval::RatePoint>& curve,
                       const std::string& title) {
    const double plot_x = 70, plot_y = 48, plot_w = 540, plot_h = 300;
    std::vector<std::string> methods;
    double vmax = 0.0;
    for (const auto& p : curve) {
        if (std::find(methods.begin(), methods.end(), p.method) == methods.end()) methods.push_back(p.method);
        vmax = std::max(vmax, p.rate);
    }
    if (vmax <= 0.0) vmax = 1.0;
    const double xmax = eval::distance_bin_center(kDistBins - 1) + 2.5;

    Svg svg(static_cast<int>(plot_x + plot_w + 170), static_cast<int>(plot_y + plot_h + 70));
    svg.text(plot_x + plot_w / 2, 24, title, 13, "middle");
    svg.line(plot_x, plot_y + plot_h, plot_x + plot_w, plot_y + plot_h, "#333333");
    svg.line(plot_x, plot_y, plot_x, plot_y + plot_h, "#333333");
    auto to_x = [&](double d) { return plot_x + plot_w * d / xmax; };
    auto to_y = [&](double r) { return plot_y + plot_h * (1.0 - r / vmax); };

    for (int db = 0; db < kDistBins; ++db) {
        const double x = to_x(eval::distance_bin_center(db));
        svg.line(x, plot_y + plot_h, x, plot_y + plot_h + 4, "#333333");
        svg.text(x, plot_y + plot_h + 16, fixed2(eval::distance_bin_center(db)), 9, "middle");
    }
    for (int i = 0; i <= 4; ++i) {
        const double frac = static_cast<double>(i) / 4.0;
        const double y = plot_y + plot_h * (1.0 - frac);
        svg.line(plot_x - 4, y, plot_x, y, "#333333");
        svg.text(plot_x - 8, y + 3, fixed4(frac * vmax), 9, "end");
    }
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const std::string color = method_color(methods[mi], mi);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : curve)
            if (p.method == methods[mi]) pts.emplace_back(to_x(eval::distance_bin_center(p.bin)), to_y(p.rate));
        svg.polyline(pts, color);
        for (const auto& [x, y] : pts) svg.circle(x, y, 2.4, color);
        const double ly = plot_y + 14 + 18 * static_cast<double>(mi);
        svg.line(plot_x + plot_w + 16, ly, plot_x + plot_w + 40, ly, color, 2.0);
        svg.text(plot_x + plot_w + 46, ly + 4, methods[mi], 10);
    }
    svg.text(plot_x + plot_w / 2, plot_y + plot_h + 40, "observer-subject distance (m)", 11, "middle");
    svg.text(20, plot_y + plot_h / 2, "error / distance", 11, "middle",
             " transform=\"rotate(-90 20 " + fixed2(plot_y + plot_h / 2) + ")\"");
    svg.save(path);
}

void write_summary(const std::filesystem::path& path, const std::string& config_echo,
                   const std::vector<MethodSummary>& methods, int region_min_pos_count) {
    auto out = open_out(path);
    out << "prediction error summary\n";
    out << "========================\n\n";
    out << "config: " << config_echo << "\n\n";
    out << "method\tsamples\tmean_error_m\tstale_samples\tstale_mean_error_m\n";
    for (const auto& m : methods) {
        out << m.name << "\t" << m.overall.count << "\t"
            << (m.overall.count ? textio::format_double(m.overall.mean()) : "") << "\t"
            << m.stale_region.count << "\t"
            << (m.stale_region.count ? textio::format_double(m.stale_region.mean()) : "") << "\n";
    }
    out << "\nstale region: cells with pos count >= " << region_min_pos_count << "\n";
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace unfog::report
