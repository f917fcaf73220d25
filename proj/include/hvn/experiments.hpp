#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hvn/metrics.hpp"

namespace hvn {

// Every tunable of the reproduction harness, with the defaults the CSVs and
// plots are produced under. JSON config files and CLI flags override fields
// by name.
struct ExperimentConfig {
    // architecture
    std::int64_t layers = 2;
    std::int64_t taps = 2;
    std::int64_t width = 32;        // output signals per layer
    std::int64_t head_hidden = 64;  // classifier hidden width
    std::int64_t fpca_scores = 16;  // O

    // training
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::int64_t epochs = 200;
    std::int64_t batch_size = 32;

    // synthetic task
    std::int64_t channels = 4;  // d
    std::int64_t bins = 32;     // p
    std::int64_t grid_size = 512;
    double phi = 0.2;
    double rho = 0.7;
    std::int64_t train_bags = 400;  // balanced total
    std::int64_t test_bags = 200;
    std::int64_t samples_per_bag = 24;  // n when not swept
    double snr_db = 30.0;               // SNR when not swept
    std::vector<double> n_sweep = {8, 16, 24, 48, 96};
    std::vector<double> snr_sweep = {-10, 0, 10, 20, 30};

    // ecg task
    std::vector<double> ecg_m_sweep = {20, 35, 70, 140};
    std::string ecg_train_path;
    std::string ecg_test_path;

    // run control
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::int64_t repeats = 1;
    bool timings = false;  // real wall_ms in the CSV (breaks byte-reproducibility)
    std::vector<std::string> models = {"hvn", "mlp", "fpca"};

    void load_json_file(const std::string& path);
    void load_json_text(const std::string& text);
    // single "key=value" override; lists take comma-separated values
    void set_key(const std::string& key, const std::string& value);
    void validate() const;
};

struct VerifyFamily {
    std::string name;
    int instances = 0;
    double worst_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string details;
};

struct VerifyReport {
    std::vector<VerifyFamily> families;
    bool pass = false;
    std::string text() const;
};

// Exact-identity suites: eigenspace recovery by polynomial filters, the
// covariance compression identity, and pointwise spectral filtering; at
// least 100 randomized instances each plus a constructed repeated-eigenvalue
// case. Deterministic under the seed.
VerifyReport run_verify(std::uint64_t seed = 0);

// Sweeps. Each writes <out_dir>/metrics.csv and <out_dir>/<task>.svg and
// returns the rows. log, when given, receives one progress line per row.
std::vector<MetricRow> run_synth_sweep(const ExperimentConfig& config,
                                       const std::string& sweep_name,  // "n" | "snr_db"
                                       std::ostream* log = nullptr);
std::vector<MetricRow> run_ecg(const ExperimentConfig& config,
                               std::ostream* log = nullptr);

}  // namespace hvn
