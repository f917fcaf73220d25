#pragma once

#include <string>
#include <vector>

#include "hvn/covariance.hpp"
#include "hvn/discretize.hpp"
#include "hvn/rng.hpp"

namespace hvn {

// Gaussian-process specification for one class of the synthetic task:
// squared-exponential temporal kernel with length scale phi, cross-channel
// factor I for class 0 and [rho^|i-j|] for class 1.
struct GPSpec {
    Eigen::Index channels = 4;
    double phi = 0.20;
    double rho = 0.7;
    Eigen::Index label = 0;
    Eigen::Index grid_size = 512;

    void validate() const;
};

// Temporal factor exp(-(t-s)^2 / (2 phi^2)).
double temporal_kernel(double t, double s, double phi);

// Cross-channel factor for the spec's class.
Matrix channel_kernel(const GPSpec& spec);

// Full (M d) x (M d) kernel on the uniform grid t_a = a / M, flattened
// channel-fastest: index(a, c) = a d + c.
SymMatrix gp_kernel_matrix(const GPSpec& spec);

// Streams n samples of GP(0, K): each is L z reshaped to M x d, where L is
// the PSD Cholesky factor of the kernel (jitter 1e-10). The factor is
// expensive; build once and reuse across bags.
class GpSampler {
public:
    explicit GpSampler(const GPSpec& spec);

    const GPSpec& spec() const { return spec_; }
    std::vector<FunctionGrid> sample_bag(Eigen::Index n, Rng& rng) const;

private:
    GPSpec spec_;
    Matrix chol_;
};

std::vector<FunctionGrid> sample_gp_bag(const GPSpec& spec, Eigen::Index n, Rng& rng);

// Additive white Gaussian noise at a target SNR (dB):
// var = ((1/n) sum_i ||x_i||^2) / 10^(snr/10), per component. An infinite
// snr_db leaves the batch untouched.
SignalBatch add_awgn(const SignalBatch& batch, double snr_db, Rng& rng);

struct SynthTaskConfig {
    Eigen::Index channels = 4;   // d
    Eigen::Index bins = 32;      // p; m = d * p
    Eigen::Index samples_per_bag = 24;
    double snr_db = 30.0;
    Eigen::Index train_bags_per_class = 200;
    Eigen::Index test_bags_per_class = 100;
    double phi = 0.20;
    double rho = 0.7;
    Eigen::Index grid_size = 512;
    double jitter = 1e-10;
    std::uint64_t seed = 0;

    Eigen::Index m() const { return channels * bins; }
    void validate() const;
};

struct SynthDataset {
    std::vector<Bag> train;
    std::vector<Bag> test;
};

// Balanced bags: GP sample -> bin-average -> AWGN -> center by bag mean,
// with the bag's normalized covariance attached. Samplers are optional
// precomputed Cholesky factories (class 0, class 1) so sweeps can reuse them.
SynthDataset make_synthetic_dataset(const SynthTaskConfig& config);
SynthDataset make_synthetic_dataset(const SynthTaskConfig& config,
                                    const GpSampler& class0, const GpSampler& class1);

// One labeled series from a UCR-format file.
struct LabeledSeries {
    Eigen::Index label = 0;
    Vector values;
};

struct UcrDataset {
    std::vector<LabeledSeries> train;
    std::vector<LabeledSeries> test;
    Eigen::Index series_length = 0;
    Eigen::Index classes = 0;
};

// Parses tab- or comma-separated rows (auto-detected per file): integer-like
// class label first, series values after. Labels are remapped to 0..K-1 by
// sorted rank over both splits. Blank lines are ignored.
UcrDataset load_ucr(const std::string& train_path, const std::string& test_path);

// d=1 bin-averaging of a series viewed as a FunctionGrid on [0,1]. When the
// length is not divisible by m, bin sizes differ by at most one:
// bin j covers [floor(j L / m), floor((j+1) L / m)).
Signal discretize_series(const Vector& series, Eigen::Index m);

}  // namespace hvn
