#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "mmra/experiment.hpp"

namespace mmra {
namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 180, kTop = 30, kBottom = 50;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::optional<double> to_double(const std::string& cell) {
    double v{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

void write_svg_plot(const CsvTable& table, const std::string& x_column, const std::vector<std::string>& y_columns,
                    const std::vector<std::string>& group_by, const std::filesystem::path& path) {
    if (table.header.empty() || table.rows.empty()) throw std::invalid_argument("plot: empty table");
    const std::size_t xi = table.column(x_column);

    std::vector<std::size_t> group_idx;
    for (const auto& g : group_by) group_idx.push_back(table.column(g));

    // series name -> (x, y) points, in row order
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
    for (const auto& y_name : y_columns) {
        const std::size_t yi = table.column(y_name);
        for (const auto& row : table.rows) {
            const auto x = to_double(row[xi]);
            const auto y = to_double(row[yi]);
            if (!x || !y) continue;
            std::string key = y_name;
            for (std::size_t i = 0; i < group_idx.size(); ++i) key += " " + group_by[i] + "=" + row[group_idx[i]];
            series[key].emplace_back(*x, *y);
            x_lo = std::min(x_lo, *x);
            x_hi = std::max(x_hi, *x);
            y_lo = std::min(y_lo, *y);
            y_hi = std::max(y_hi, *y);
        }
    }
    if (series.empty()) throw std::invalid_argument("plot: no numeric data in the requested columns");
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    y_lo = std::min(y_lo, 0.0);

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return kTop + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / 5.0;
        const double yv = y_lo + (y_hi - y_lo) * i / 5.0;
        svg << "<text x=\"" << sx(xv) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << tick_label(xv)
            << "</text>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << tick_label(yv)
            << "</text>\n";
        svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << sy(yv) << "\" y2=\"" << sy(yv)
            << "\" stroke=\"#ddd\"/>\n";
    }
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
        << escape(x_column) << "</text>\n";

    std::size_t color = 0;
    double legend_y = kTop + 10;
    for (auto& [name, pts] : series) {
        std::sort(pts.begin(), pts.end());
        const char* stroke = kPalette[color++ % kPalette.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) svg << sx(x) << ',' << sy(y) << ' ';
        svg << "\"/>\n";
        for (const auto& [x, y] : pts)
            svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"2.5\" fill=\"" << stroke << "\"/>\n";
        svg << "<line x1=\"" << kLeft + pw + 10 << "\" x2=\"" << kLeft + pw + 30 << "\" y1=\"" << legend_y
            << "\" y2=\"" << legend_y << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kLeft + pw + 34 << "\" y=\"" << legend_y + 4 << "\">" << escape(name) << "</text>\n";
        legend_y += 16;
    }
    svg << "</svg>\n";

    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << svg.str();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace mmra
