#include "hvn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hvn/errors.hpp"

namespace hvn {

using plot_layout::inner_height;
using plot_layout::inner_width;
using plot_layout::kHeight;
using plot_layout::kMarginBottom;
using plot_layout::kMarginLeft;
using plot_layout::kMarginTop;
using plot_layout::kWidth;

double plot_x(double value, double lo, double hi) {
    double span = hi - lo;
    if (span <= 0.0) return kMarginLeft + 0.5 * inner_width();
    return kMarginLeft + (value - lo) / span * inner_width();
}

double plot_y(double accuracy) {
    return kMarginTop + (1.0 - accuracy) * inner_height();
}

double plot_x_inverse(double px, double lo, double hi) {
    double span = hi - lo;
    if (span <= 0.0) return lo;
    return lo + (px - kMarginLeft) / inner_width() * span;
}

double plot_y_inverse(double py) {
    return 1.0 - (py - kMarginTop) / inner_height();
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

const char* model_color(const std::string& model, std::size_t index) {
    if (model == "hvn") return "#d62728";
    if (model == "mlp") return "#1f77b4";
    if (model == "fpca") return "#2ca02c";
    static const char* palette[] = {"#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
    return palette[index % 4];
}

}  // namespace

std::string render_accuracy_svg(const std::vector<MetricRow>& rows) {
    if (rows.empty()) throw InvalidInputError("render_accuracy_svg: no rows");
    const std::string task = rows.front().task;
    const std::string sweep_name = rows.front().sweep_name;
    for (const auto& row : rows) {
        if (row.task != task) {
            throw InvalidInputError("render_accuracy_svg: rows span several tasks");
        }
    }

    double lo = rows.front().sweep_value, hi = rows.front().sweep_value;
    std::set<double> ticks;
    std::map<std::string, std::map<double, double>> series;  // model -> x -> acc
    std::vector<std::string> model_order;
    for (const auto& row : rows) {
        lo = std::min(lo, row.sweep_value);
        hi = std::max(hi, row.sweep_value);
        ticks.insert(row.sweep_value);
        if (!series.count(row.model)) model_order.push_back(row.model);
        series[row.model][row.sweep_value] = row.test_acc;
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n";
    svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kMarginLeft << "\" y=\"24\" font-size=\"16\" "
           "font-family=\"sans-serif\">"
        << task << "</text>\n";

    // axes
    double x0 = kMarginLeft, x1 = kWidth - plot_layout::kMarginRight;
    double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1)
        << "\" y2=\"" << fmt(y0) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0)
        << "\" y2=\"" << fmt(y1) << "\" stroke=\"black\"/>\n";

    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        double py = plot_y(tick);
        svg << "<line x1=\"" << fmt(x0 - 4) << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(x0) << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(x0 - 10) << "\" y=\"" << fmt(py + 4)
            << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">"
            << format_metric(tick) << "</text>\n";
        svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(x1)
            << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\"/>\n";
    }
    for (double tick : ticks) {
        double px = plot_x(tick, lo, hi);
        svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << fmt(y0 + 4) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(y0 + 18)
            << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">"
            << format_metric(tick) << "</text>\n";
    }
    svg << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kHeight - 16)
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">"
        << sweep_name << "</text>\n";
    svg << "<text x=\"18\" y=\"" << fmt((y0 + y1) / 2)
        << "\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 18 "
        << fmt((y0 + y1) / 2) << ")\" text-anchor=\"middle\">test accuracy</text>\n";

    std::size_t color_index = 0;
    double legend_y = kMarginTop + 10;
    for (const std::string& model : model_order) {
        const char* color = model_color(model, color_index++);
        std::ostringstream points;
        bool first = true;
        for (const auto& [xv, acc] : series[model]) {
            if (!first) points << ' ';
            points << fmt(plot_x(xv, lo, hi)) << ',' << fmt(plot_y(acc));
            first = false;
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" data-model=\"" << model << "\" points=\""
            << points.str() << "\"/>\n";
        for (const auto& [xv, acc] : series[model]) {
            svg << "<circle cx=\"" << fmt(plot_x(xv, lo, hi)) << "\" cy=\""
                << fmt(plot_y(acc)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        svg << "<line x1=\"" << fmt(x1 + 14) << "\" y1=\"" << fmt(legend_y) << "\" x2=\""
            << fmt(x1 + 38) << "\" y2=\"" << fmt(legend_y) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt(x1 + 44) << "\" y=\"" << fmt(legend_y + 4)
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << model << "</text>\n";
        legend_y += 20;
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::string& csv_path, const std::string& out_path) {
    std::vector<MetricRow> rows = read_metrics_csv(csv_path);
    if (rows.empty()) {
        throw InvalidInputError("emit_plot: " + csv_path + " holds no data rows");
    }
    std::string svg = render_accuracy_svg(rows);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("emit_plot: cannot open " + out_path);
    out << svg;
    if (!out) throw IoError("emit_plot: write failed for " + out_path);
}

std::vector<std::string> emit_task_plots(const std::string& csv_path,
                                         const std::string& out_dir) {
    std::vector<MetricRow> rows = read_metrics_csv(csv_path);
    if (rows.empty()) {
        throw InvalidInputError("emit_task_plots: " + csv_path + " holds no data rows");
    }
    std::map<std::string, std::vector<MetricRow>> by_task;
    std::vector<std::string> order;
    for (const auto& row : rows) {
        if (!by_task.count(row.task)) order.push_back(row.task);
        by_task[row.task].push_back(row);
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (const std::string& task : order) {
        std::string path = out_dir + "/" + task + ".svg";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("emit_task_plots: cannot open " + path);
        out << render_accuracy_svg(by_task[task]);
        written.push_back(path);
    }
    return written;
}

}  // namespace hvn
