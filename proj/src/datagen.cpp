#include "hvn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace hvn {

void GPSpec::validate() const {
    if (channels < 1) throw ConfigError("GPSpec: need at least one channel");
    if (!(phi > 0.0)) throw ConfigError("GPSpec: phi must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("GPSpec: rho must lie in (0,1)");
    if (label != 0 && label != 1) throw ConfigError("GPSpec: label must be 0 or 1");
    if (grid_size < 1) throw ConfigError("GPSpec: empty grid");
}

double temporal_kernel(double t, double s, double phi) {
    double d = t - s;
    return std::exp(-d * d / (2.0 * phi * phi));
}

Matrix channel_kernel(const GPSpec& spec) {
    if (spec.label == 0) {
        return Matrix::Identity(spec.channels, spec.channels);
    }
    Matrix sigma(spec.channels, spec.channels);
    for (Eigen::Index i = 0; i < spec.channels; ++i) {
        for (Eigen::Index j = 0; j < spec.channels; ++j) {
            sigma(i, j) = std::pow(spec.rho, std::abs(static_cast<double>(i - j)));
        }
    }
    return sigma;
}

SymMatrix gp_kernel_matrix(const GPSpec& spec) {
    spec.validate();
    const Eigen::Index m = spec.grid_size;
    const Eigen::Index d = spec.channels;
    Matrix temporal(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        double ta = static_cast<double>(a) / static_cast<double>(m);
        for (Eigen::Index b = 0; b <= a; ++b) {
            double tb = static_cast<double>(b) / static_cast<double>(m);
            double v = temporal_kernel(ta, tb, spec.phi);
            temporal(a, b) = v;
            temporal(b, a) = v;
        }
    }
    Matrix sigma = channel_kernel(spec);
    Matrix full(m * d, m * d);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
            full.block(a * d, b * d, d, d) = temporal(a, b) * sigma;
        }
    }
    return SymMatrix{full};
}

GpSampler::GpSampler(const GPSpec& spec) : spec_(spec) {
    SymMatrix kernel = gp_kernel_matrix(spec);
    chol_ = cholesky_psd(kernel, 1e-10);
}

std::vector<FunctionGrid> GpSampler::sample_bag(Eigen::Index n, Rng& rng) const {
    if (n < 1) throw InvalidInputError("sample_bag: need at least one sample");
    const Eigen::Index dim = chol_.rows();
    Matrix z(dim, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < dim; ++k) z(k, i) = rng.normal();
    Matrix x = chol_ * z;

    std::vector<FunctionGrid> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        FunctionGrid g(spec_.grid_size, spec_.channels);
        for (Eigen::Index a = 0; a < spec_.grid_size; ++a)
            for (Eigen::Index c = 0; c < spec_.channels; ++c)
                g.values(a, c) = x(a * spec_.channels + c, i);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<FunctionGrid> sample_gp_bag(const GPSpec& spec, Eigen::Index n, Rng& rng) {
    return GpSampler(spec).sample_bag(n, rng);
}

namespace {

double batch_power(const SignalBatch& batch) {
    return batch.columns.squaredNorm() / static_cast<double>(batch.n());
}

}  // namespace

SignalBatch add_awgn(const SignalBatch& batch, double snr_db, Rng& rng) {
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return batch;
    }
    double power = batch_power(batch);
    if (power <= 0.0) {
        throw InvalidInputError("add_awgn: SNR is undefined for an all-zero batch");
    }
    double sigma2 = power / std::pow(10.0, snr_db / 10.0);
    double sigma = std::sqrt(sigma2);
    SignalBatch out = batch;
    for (Eigen::Index i = 0; i < out.columns.cols(); ++i)
        for (Eigen::Index k = 0; k < out.columns.rows(); ++k)
            out.columns(k, i) += sigma * rng.normal();
    return out;
}

void SynthTaskConfig::validate() const {
    if (channels < 1 || bins < 1) throw ConfigError("SynthTaskConfig: bad shape");
    if (grid_size % bins != 0) {
        throw ConfigError("SynthTaskConfig: grid size must be divisible by the bin count");
    }
    if (samples_per_bag < 2) {
        throw ConfigError("SynthTaskConfig: bags need at least two samples");
    }
    if (train_bags_per_class < 1 || test_bags_per_class < 1) {
        throw ConfigError("SynthTaskConfig: need bags in both splits");
    }
    if (!(phi > 0.0) || !(rho > 0.0 && rho < 1.0)) {
        throw ConfigError("SynthTaskConfig: bad kernel parameters");
    }
}

namespace {

Bag make_bag(const SynthTaskConfig& config, const GpSampler& sampler,
             Eigen::Index label, Rng& rng) {
    BinAverageOp op{config.bins, config.channels};
    std::vector<FunctionGrid> samples = sampler.sample_bag(config.samples_per_bag, rng);
    Matrix cols(op.m(), config.samples_per_bag);
    for (Eigen::Index i = 0; i < config.samples_per_bag; ++i) {
        cols.col(i) = bin_average_forward(op, samples[static_cast<std::size_t>(i)]);
    }
    SignalBatch noisy = add_awgn(SignalBatch{cols}, config.snr_db, rng);
    Vector mean = noisy.columns.rowwise().mean();
    noisy.columns.colwise() -= mean;

    Bag bag;
    bag.label = label;
    bag.cov = normalize_cov(empirical_cov_matrix(noisy));
    bag.signals = std::move(noisy);
    return bag;
}

// Per-bag streams: a bag is identified by (split, class, index).
std::uint64_t bag_stream(int split, Eigen::Index label, Eigen::Index index) {
    return static_cast<std::uint64_t>(split) * 1000000000ULL +
           static_cast<std::uint64_t>(label) * 1000000ULL +
           static_cast<std::uint64_t>(index);
}

}  // namespace

SynthDataset make_synthetic_dataset(const SynthTaskConfig& config,
                                    const GpSampler& class0, const GpSampler& class1) {
    config.validate();
    SynthDataset out;
    for (int split = 0; split < 2; ++split) {
        Eigen::Index per_class =
            split == 0 ? config.train_bags_per_class : config.test_bags_per_class;
        std::vector<Bag>& dest = split == 0 ? out.train : out.test;
        for (Eigen::Index label = 0; label < 2; ++label) {
            const GpSampler& sampler = label == 0 ? class0 : class1;
            for (Eigen::Index b = 0; b < per_class; ++b) {
                Rng rng(mix_seed(config.seed, bag_stream(split, label, b)));
                dest.push_back(make_bag(config, sampler, label, rng));
            }
        }
    }
    return out;
}

SynthDataset make_synthetic_dataset(const SynthTaskConfig& config) {
    config.validate();
    GPSpec base;
    base.channels = config.channels;
    base.phi = config.phi;
    base.rho = config.rho;
    base.grid_size = config.grid_size;
    GPSpec spec0 = base, spec1 = base;
    spec0.label = 0;
    spec1.label = 1;
    GpSampler class0(spec0), class1(spec1);
    return make_synthetic_dataset(config, class0, class1);
}

namespace {

char detect_delimiter(const std::string& line, const std::string& path) {
    if (line.find('\t') != std::string::npos) return '\t';
    if (line.find(',') != std::string::npos) return ',';
    throw ParseError("load_ucr: no tab or comma delimiter in " + path);
}

std::vector<double> parse_row(const std::string& line, char delim,
                              const std::string& path, std::size_t line_no) {
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delim)) {
        // trim spaces and CR
        std::size_t first = field.find_first_not_of(" \r");
        std::size_t last = field.find_last_not_of(" \r");
        if (first == std::string::npos) continue;
        field = field.substr(first, last - first + 1);
        char* end = nullptr;
        double v = std::strtod(field.c_str(), &end);
        if (end == field.c_str() || *end != '\0') {
            throw ParseError("load_ucr: " + path + ":" + std::to_string(line_no) +
                             ": cannot parse field '" + field + "'");
        }
        fields.push_back(v);
    }
    return fields;
}

std::vector<LabeledSeries> load_ucr_file(const std::string& path,
                                         Eigen::Index& series_length) {
    std::ifstream in(path);
    if (!in) throw IoError("load_ucr: cannot open " + path);
    std::vector<LabeledSeries> rows;
    std::string line;
    std::size_t line_no = 0;
    char delim = '\0';
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (delim == '\0') delim = detect_delimiter(line, path);
        std::vector<double> fields = parse_row(line, delim, path, line_no);
        if (fields.size() < 2) {
            throw ParseError("load_ucr: " + path + ":" + std::to_string(line_no) +
                             ": row has no series values");
        }
        double raw_label = fields[0];
        double rounded = std::round(raw_label);
        if (std::abs(raw_label - rounded) > 1e-9) {
            throw ParseError("load_ucr: " + path + ":" + std::to_string(line_no) +
                             ": label is not an integer");
        }
        Eigen::Index length = static_cast<Eigen::Index>(fields.size()) - 1;
        if (series_length == 0) {
            series_length = length;
        } else if (length != series_length) {
            throw ShapeError("load_ucr: " + path + ":" + std::to_string(line_no) +
                             ": series length " + std::to_string(length) +
                             " does not match " + std::to_string(series_length));
        }
        LabeledSeries row;
        row.label = static_cast<Eigen::Index>(rounded);
        row.values.resize(length);
        for (Eigen::Index i = 0; i < length; ++i) {
            row.values[i] = fields[static_cast<std::size_t>(i) + 1];
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("load_ucr: " + path + " holds no rows");
    return rows;
}

}  // namespace

UcrDataset load_ucr(const std::string& train_path, const std::string& test_path) {
    UcrDataset out;
    out.series_length = 0;
    out.train = load_ucr_file(train_path, out.series_length);
    out.test = load_ucr_file(test_path, out.series_length);

    std::map<Eigen::Index, Eigen::Index> remap;
    for (const auto& rows : {out.train, out.test}) {
        for (const auto& row : rows) remap[row.label] = 0;
    }
    Eigen::Index next = 0;
    for (auto& [raw, mapped] : remap) mapped = next++;
    for (auto* rows : {&out.train, &out.test}) {
        for (auto& row : *rows) row.label = remap.at(row.label);
    }
    out.classes = next;
    return out;
}

Signal discretize_series(const Vector& series, Eigen::Index m) {
    const Eigen::Index length = series.size();
    if (m < 1 || m > length) {
        throw InvalidInputError("discretize_series: need 1 <= m <= " +
                                std::to_string(length));
    }
    const double delta = 1.0 / static_cast<double>(length);
    Signal out(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index begin = (j * length) / m;
        Eigen::Index end = ((j + 1) * length) / m;
        double acc = series.segment(begin, end - begin).sum();
        // (1 / sqrt(bin measure)) * integral over the bin
        out[j] = std::sqrt(delta / static_cast<double>(end - begin)) * acc;
    }
    return out;
}

}  // namespace hvn
