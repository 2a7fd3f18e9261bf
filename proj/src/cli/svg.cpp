#include "goldlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace goldlab::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 616.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 432.0;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double scale(double v, double px_lo, double px_hi) const {
        const double t = (v - lo) / (hi - lo);
        return px_lo + t * (px_hi - px_lo);
    }
};

Range pad_range(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) return {0.0, 1.0};
    if (lo == hi) return {lo - 1.0, hi + 1.0};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Range& xr, const Range& yr,
               const std::string& x_label, const std::string& y_label) {
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\""
        << fmt(kRight) << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = i / 5.0;
        const double xv = xr.lo + t * (xr.hi - xr.lo);
        const double xp = xr.scale(xv, kLeft, kRight);
        out << "<line x1=\"" << fmt(xp) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(xp)
            << "\" y2=\"" << fmt(kBottom + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(xp) << "\" y=\"" << fmt(kBottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(xv) << "</text>\n";
        const double yv = yr.lo + t * (yr.hi - yr.lo);
        const double yp = yr.scale(yv, kBottom, kTop);
        out << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(yp) << "\" x2=\""
            << fmt(kLeft) << "\" y2=\"" << fmt(yp) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(yp + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(yv) << "</text>\n";
    }
    out << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << fmt(kHeight - 8)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << fmt((kTop + kBottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << fmt((kTop + kBottom) / 2) << ")\">" << y_label << "</text>\n";
}

}  // namespace

std::string palette_color(std::size_t index) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[index % (sizeof(colors) / sizeof(colors[0]))];
}

std::string heat_color(double t) {
    t = std::min(1.0, std::max(0.0, t));
    const int r = static_cast<int>(std::lround(40 + 215 * t));
    const int g = static_cast<int>(std::lround(60 + 40 * (1.0 - std::abs(2 * t - 1))));
    const int b = static_cast<int>(std::lround(40 + 215 * (1.0 - t)));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    bool any = false;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
            any = true;
        }
    const Range xr = any ? pad_range(x_lo, x_hi) : Range{0.0, 1.0};
    const Range yr = any ? pad_range(y_lo, y_hi) : Range{0.0, 1.0};

    std::ostringstream out;
    open_svg(out, title);
    draw_axes(out, xr, yr, x_label, y_label);
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points)
            out << fmt(xr.scale(x, kLeft, kRight)) << "," << fmt(yr.scale(y, kBottom, kTop))
                << " ";
        out << "\"/>\n";
    }
    double legend_y = kTop + 14;
    for (const auto& s : series) {
        if (s.label.empty()) continue;
        out << "<line x1=\"" << fmt(kRight - 150) << "\" y1=\"" << fmt(legend_y - 4)
            << "\" x2=\"" << fmt(kRight - 126) << "\" y2=\"" << fmt(legend_y - 4)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(kRight - 120) << "\" y=\"" << fmt(legend_y)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_histogram(const std::string& title, const eval::HistogramTable& table) {
    const auto bar_series = [](const eval::HistogramSeries& s) {
        double hi = 0.0;
        for (std::size_t c : s.counts) hi = std::max(hi, static_cast<double>(c));
        return hi;
    };
    const double max_count = std::max(bar_series(table.marginal), bar_series(table.conditional));
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    for (const auto* s : {&table.marginal, &table.conditional}) {
        if (s->counts.empty()) continue;
        x_lo = std::min(x_lo, s->lo);
        x_hi = std::max(x_hi, s->lo + s->width * static_cast<double>(s->counts.size()));
    }
    const bool any = std::isfinite(x_lo);
    const Range xr = any ? pad_range(x_lo, x_hi) : Range{0.0, 1.0};
    const Range yr = pad_range(0.0, std::max(1.0, max_count));

    std::ostringstream out;
    open_svg(out, title);
    draw_axes(out, xr, yr, "term value", "count");
    const auto draw_bars = [&](const eval::HistogramSeries& s, const std::string& color,
                               double opacity) {
        for (std::size_t b = 0; b < s.counts.size(); ++b) {
            const double lo = s.lo + s.width * static_cast<double>(b);
            const double hi = lo + s.width;
            const double x0 = xr.scale(lo, kLeft, kRight);
            const double x1 = xr.scale(hi, kLeft, kRight);
            const double y0 = yr.scale(static_cast<double>(s.counts[b]), kBottom, kTop);
            out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\""
                << fmt(std::max(0.5, x1 - x0)) << "\" height=\"" << fmt(kBottom - y0)
                << "\" fill=\"" << color << "\" fill-opacity=\"" << fmt(opacity) << "\"/>\n";
        }
    };
    draw_bars(table.marginal, palette_color(0), 0.6);
    draw_bars(table.conditional, palette_color(1), 0.6);
    out << "<text x=\"" << fmt(kRight - 150) << "\" y=\"" << fmt(kTop + 14)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << palette_color(0)
        << "\">marginal</text>\n";
    out << "<text x=\"" << fmt(kRight - 150) << "\" y=\"" << fmt(kTop + 30)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << palette_color(1)
        << "\">conditional</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string svg_scatter(const std::string& title, const std::vector<ScatterPoint>& points) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& p : points) {
        x_lo = std::min(x_lo, p.x);
        x_hi = std::max(x_hi, p.x);
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
    }
    const bool any = !points.empty();
    const Range xr = any ? pad_range(x_lo, x_hi) : Range{0.0, 1.0};
    const Range yr = any ? pad_range(y_lo, y_hi) : Range{0.0, 1.0};

    std::ostringstream out;
    open_svg(out, title);
    draw_axes(out, xr, yr, "x1", "x2");
    for (const auto& p : points) {
        out << "<circle cx=\"" << fmt(xr.scale(p.x, kLeft, kRight)) << "\" cy=\""
            << fmt(yr.scale(p.y, kBottom, kTop)) << "\" r=\"" << fmt(p.radius) << "\" fill=\""
            << p.color << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace goldlab::cli
