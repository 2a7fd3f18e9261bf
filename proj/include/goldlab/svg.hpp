#pragma once

#include <string>
#include <utility>
#include <vector>

#include "goldlab/eval.hpp"

namespace goldlab::cli {

// Dependency-free SVG emitters. Output is byte-deterministic for identical
// inputs (fixed canvas, fixed float formatting, no timestamps).

struct SvgSeries {
    std::string label;
    std::string color;  // "#rrggbb"
    std::vector<std::pair<double, double>> points;
};

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string color;
    double radius = 2.5;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series);

std::string svg_histogram(const std::string& title, const eval::HistogramTable& table);

std::string svg_scatter(const std::string& title, const std::vector<ScatterPoint>& points);

// Blue-to-red heat color for t in [0, 1].
std::string heat_color(double t);

// Fixed categorical palette (class colors, arm colors).
std::string palette_color(std::size_t index);

}  // namespace goldlab::cli
