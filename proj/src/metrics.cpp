#include "hvn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hvn/errors.hpp"

namespace hvn {

std::string format_metric(double value) {
    if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", value);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows) {
    bool with_std = false;
    for (const auto& row : rows) with_std = with_std || row.test_acc_std.has_value();

    std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
    if (!out) throw IoError("write_metrics_csv: cannot open " + path);
    out << "task,model,sweep_name,sweep_value,seed,train_acc,test_acc,final_loss,wall_ms";
    if (with_std) out << ",test_acc_std";
    out << "\n";
    for (const auto& row : rows) {
        out << row.task << ',' << row.model << ',' << row.sweep_name << ','
            << format_metric(row.sweep_value) << ',' << row.seed << ','
            << format_metric(row.train_acc) << ',' << format_metric(row.test_acc) << ','
            << format_metric(row.final_loss) << ',' << row.wall_ms;
        if (with_std) {
            out << ',' << format_metric(row.test_acc_std.value_or(0.0));
        }
        out << "\n";
    }
    if (!out) throw IoError("write_metrics_csv: write failed for " + path);
}

std::vector<MetricRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_metrics_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("read_metrics_csv: empty file " + path);
    bool with_std = line.find("test_acc_std") != std::string::npos;
    if (line.rfind("task,model,sweep_name,sweep_value,seed,train_acc,test_acc,final_loss,wall_ms",
                   0) != 0) {
        throw ParseError("read_metrics_csv: unexpected header in " + path);
    }

    std::vector<MetricRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        std::size_t expected = with_std ? 10 : 9;
        if (fields.size() != expected) {
            throw ParseError("read_metrics_csv: " + path + ":" + std::to_string(line_no) +
                             ": expected " + std::to_string(expected) + " fields");
        }
        MetricRow row;
        row.task = fields[0];
        row.model = fields[1];
        row.sweep_name = fields[2];
        try {
            row.sweep_value = std::stod(fields[3]);
            row.seed = std::stoull(fields[4]);
            row.train_acc = std::stod(fields[5]);
            row.test_acc = std::stod(fields[6]);
            row.final_loss = std::stod(fields[7]);
            row.wall_ms = std::stoll(fields[8]);
            if (with_std) row.test_acc_std = std::stod(fields[9]);
        } catch (const std::exception&) {
            throw ParseError("read_metrics_csv: " + path + ":" + std::to_string(line_no) +
                             ": malformed numeric field");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hvn
