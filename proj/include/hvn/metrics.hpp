#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hvn {

// One result line of an experiment run. test_acc_std is only present for
// multi-repeat runs and adds a trailing CSV column.
struct MetricRow {
    std::string task;
    std::string model;
    std::string sweep_name;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double final_loss = 0.0;
    std::int64_t wall_ms = 0;
    std::optional<double> test_acc_std;
};

// Deterministic number formatting shared by the CSV writer and the plot
// renderer: integers print bare, everything else with six decimals.
std::string format_metric(double value);

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(const std::string& path);

}  // namespace hvn
