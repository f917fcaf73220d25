#pragma once

#include <string>
#include <vector>

#include "hvn/metrics.hpp"

namespace hvn {

// Fixed chart geometry, shared with the round-trip test.
namespace plot_layout {
constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 60.0;

inline double inner_width() { return kWidth - kMarginLeft - kMarginRight; }
inline double inner_height() { return kHeight - kMarginTop - kMarginBottom; }
}  // namespace plot_layout

// Line chart of test accuracy against the sweep variable, one polyline per
// model. Rows must share one task; the y-axis is fixed to [0, 1].
std::string render_accuracy_svg(const std::vector<MetricRow>& rows);

// Spec surface: read a single-task metrics CSV, write one SVG.
void emit_plot(const std::string& csv_path, const std::string& out_path);

// Multi-task CSVs: one <task>.svg per task under out_dir; returns the files.
std::vector<std::string> emit_task_plots(const std::string& csv_path,
                                         const std::string& out_dir);

// Mapping between data coordinates and pixels, exposed for the round-trip
// test. Pixel x for a sweep value given the [lo, hi] range, and back.
double plot_x(double value, double lo, double hi);
double plot_y(double accuracy);
double plot_x_inverse(double px, double lo, double hi);
double plot_y_inverse(double py);

}  // namespace hvn
