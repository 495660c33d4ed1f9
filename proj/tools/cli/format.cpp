#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qda::cli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out = table.axis_name;
    for (const auto& c : table.columns) {
        out += ',';
        out += c;
    }
    out += '\n';
    for (std::size_t i = 0; i < table.axis.size(); ++i) {
        out += format_double(table.axis[i]);
        for (const auto& cell : table.rows[i]) {
            out += ',';
            if (cell) out += format_double(*cell);
        }
        out += '\n';
    }
    return out;
}

namespace {

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
                                   "#bcbd22", "#e377c2"};

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

std::string to_svg(const Table& table) {
    const int width = 960, height = 600;
    const int ml = 70, mr = 180, mt = 30, mb = 50; // margins
    const double x0 = ml, x1 = width - mr;
    const double y0 = height - mb, y1 = mt;

    double xmin = 0.0, xmax = 1.0;
    if (!table.axis.empty()) {
        xmin = *std::min_element(table.axis.begin(), table.axis.end());
        xmax = *std::max_element(table.axis.begin(), table.axis.end());
    }
    double ymin = 0.0, ymax = 1.0;
    bool have_y = false;
    for (const auto& row : table.rows)
        for (const auto& cell : row)
            if (cell && std::isfinite(*cell)) {
                if (!have_y) {
                    ymin = ymax = *cell;
                    have_y = true;
                } else {
                    ymin = std::min(ymin, *cell);
                    ymax = std::max(ymax, *cell);
                }
            }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
    auto sy = [&](double y) { return y0 + (y - ymin) / (ymax - ymin) * (y1 - y0); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
        << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Gridlines and tick labels, six per axis.
    svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = sx(xmin + (xmax - xmin) * t / 5.0);
        const double fy = sy(ymin + (ymax - ymin) * t / 5.0);
        svg << "<line x1=\"" << fx << "\" y1=\"" << y0 << "\" x2=\"" << fx
            << "\" y2=\"" << y1 << "\"/>\n";
        svg << "<line x1=\"" << x0 << "\" y1=\"" << fy << "\" x2=\"" << x1
            << "\" y2=\"" << fy << "\"/>\n";
    }
    svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
    for (int t = 0; t <= 5; ++t) {
        const double vx = xmin + (xmax - xmin) * t / 5.0;
        const double vy = ymin + (ymax - ymin) * t / 5.0;
        svg << "<text x=\"" << sx(vx) << "\" y=\"" << y0 + 18
            << "\" text-anchor=\"middle\">" << tick_label(vx) << "</text>\n";
        svg << "<text x=\"" << x0 - 8 << "\" y=\"" << sy(vy) + 4
            << "\" text-anchor=\"end\">" << tick_label(vy) << "</text>\n";
    }
    svg << "<text x=\"" << 0.5 * (x0 + x1) << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << table.axis_name << "</text>\n</g>\n";

    // Axes frame.
    svg << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0
        << "\" height=\"" << y0 - y1
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    const std::size_t n_palette = sizeof palette / sizeof palette[0];
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const char* color = palette[c % n_palette];
        svg << "<g fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\">\n";
        std::ostringstream points;
        bool open = false;
        auto flush = [&]() {
            if (open) svg << "<polyline points=\"" << points.str() << "\"/>\n";
            points.str("");
            open = false;
        };
        for (std::size_t i = 0; i < table.axis.size(); ++i) {
            const auto& cell = table.rows[i][c];
            if (cell && std::isfinite(*cell)) {
                points << sx(table.axis[i]) << ',' << sy(*cell) << ' ';
                open = true;
            } else {
                flush();
            }
        }
        flush();
        svg << "</g>\n";
        const double ly = mt + 18.0 * static_cast<double>(c) + 10;
        svg << "<line x1=\"" << x1 + 10 << "\" y1=\"" << ly << "\" x2=\""
            << x1 + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << x1 + 40 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">"
            << table.columns[c] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open for writing: " + path);
    out << contents;
    if (!out.flush()) throw std::ios_base::failure("write failed: " + path);
}

} // namespace qda::cli
