#include "hvn/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace hvn {

void HVNConfig::validate() const {
    if (per_column_head) {
        if (layers != 0 || taps != 0) {
            throw ConfigError("HVNConfig: per-column heads take no polynomial layers");
        }
    } else if (layers < 1) {
        throw ConfigError("HVNConfig: need at least one layer");
    }
    if (taps < 0) throw ConfigError("HVNConfig: negative tap count");
    if (static_cast<Eigen::Index>(widths.size()) != layers + 1) {
        throw ConfigError("HVNConfig: widths must list F_0..F_T");
    }
    for (Eigen::Index w : widths) {
        if (w < 1) throw ConfigError("HVNConfig: widths must be positive");
    }
    for (Eigen::Index h : head_hidden) {
        if (h < 1) throw ConfigError("HVNConfig: head widths must be positive");
    }
    if (classes < 2) throw ConfigError("HVNConfig: need at least two classes");
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("TrainConfig: bad learning rate");
    if (epochs < 1) throw ConfigError("TrainConfig: need at least one epoch");
    if (batch_size < 1) throw ConfigError("TrainConfig: need a positive batch size");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("TrainConfig: betas must lie in [0,1)");
    }
}

double gelu(double x) { return 0.5 * x * std::erfc(-x * M_SQRT1_2); }

double gelu_derivative(double x) {
    double cdf = 0.5 * std::erfc(-x * M_SQRT1_2);
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    return cdf + x * pdf;
}

namespace {

Matrix apply_activation(Nonlinearity nl, const Matrix& x) {
    if (nl == Nonlinearity::Identity) return x;
    return x.unaryExpr([](double v) { return gelu(v); });
}

}  // namespace

Vector mean_pool(const Matrix& x) {
    if (x.rows() < 1) throw ShapeError("mean_pool: empty input");
    return x.colwise().mean().transpose();
}

double cross_entropy(const Vector& logits, Eigen::Index label) {
    if (label < 0 || label >= logits.size()) {
        throw InvalidInputError("cross_entropy: label out of range");
    }
    double mx = logits.maxCoeff();
    double lse = std::log((logits.array() - mx).exp().sum());
    return lse - (logits[label] - mx);
}

Vector softmax(const Vector& logits) {
    double mx = logits.maxCoeff();
    Vector e = (logits.array() - mx).exp();
    return e / e.sum();
}

Matrix hvn_layer_forward(const CovMatrix* c, const Matrix& x,
                         const std::vector<Matrix>& weights, Nonlinearity nl) {
    if (weights.empty()) throw InvalidInputError("hvn_layer_forward: no taps");
    if (c != nullptr && c->dim() != x.rows()) {
        throw ShapeError("hvn_layer_forward: covariance size does not match signals");
    }
    for (const Matrix& w : weights) {
        if (w.rows() != x.cols() || w.cols() != weights[0].cols()) {
            throw ShapeError("hvn_layer_forward: tap shape does not match features");
        }
    }
    Matrix shifted = x;
    Matrix pre = shifted * weights[0];
    for (std::size_t j = 1; j < weights.size(); ++j) {
        if (c != nullptr) shifted = c->inner.entries() * shifted;
        pre.noalias() += shifted * weights[j];
    }
    return apply_activation(nl, pre);
}

Vector head_forward(const std::vector<DenseLayer>& head, const Vector& input) {
    if (head.empty()) throw InvalidInputError("head_forward: empty head");
    if (head.front().weight.rows() != input.size()) {
        throw ShapeError("head_forward: input length does not match the head");
    }
    Vector h = input;
    for (std::size_t i = 0; i < head.size(); ++i) {
        Vector z = head[i].weight.transpose() * h + head[i].bias;
        h = (i + 1 < head.size()) ? Vector(z.unaryExpr([](double v) { return gelu(v); }))
                                  : z;
    }
    return h;
}

Vector hvn_forward(const HVNConfig& config, const HVNParams& params,
                   const CovMatrix* c, const Matrix& x0, ForwardTrace* trace) {
    config.validate();
    const CovMatrix* shift = config.identity_shift ? nullptr : c;
    if (!config.per_column_head) {
        if (x0.cols() != config.widths[0]) {
            throw ShapeError("hvn_forward: input features do not match F_0");
        }
        if (shift == nullptr && !config.identity_shift && config.layers > 0) {
            throw InvalidInputError("hvn_forward: covariance required");
        }
    } else if (x0.rows() != config.widths[0]) {
        throw ShapeError("hvn_forward: per-column input rows do not match the head");
    }

    if (trace) {
        trace->shifted.clear();
        trace->preact.clear();
        trace->activations.clear();
        trace->head_pre.clear();
        trace->head_post.clear();
    }

    Matrix x = x0;
    if (trace) trace->activations.push_back(x);
    for (Eigen::Index t = 0; t < config.layers; ++t) {
        const auto& taps = params.taps[static_cast<std::size_t>(t)];
        std::vector<Matrix> powers;
        powers.reserve(taps.size());
        powers.push_back(x);
        Matrix pre = x * taps[0];
        for (std::size_t j = 1; j < taps.size(); ++j) {
            Matrix next = (shift != nullptr)
                              ? Matrix(shift->inner.entries() * powers.back())
                              : powers.back();
            pre.noalias() += next * taps[j];
            powers.push_back(std::move(next));
        }
        Matrix activated = apply_activation(config.nonlinearity, pre);
        if (trace) {
            trace->shifted.push_back(std::move(powers));
            trace->preact.push_back(pre);
            trace->activations.push_back(activated);
        }
        x = std::move(activated);
    }

    Vector logits;
    if (config.per_column_head) {
        logits = Vector::Zero(config.classes);
        for (Eigen::Index col = 0; col < x.cols(); ++col) {
            logits += head_forward(params.head, x.col(col));
        }
        logits /= static_cast<double>(x.cols());
    } else {
        Vector pooled = mean_pool(x);
        if (trace) trace->pooled = pooled;
        Vector h = pooled;
        for (std::size_t i = 0; i < params.head.size(); ++i) {
            Vector z = params.head[i].weight.transpose() * h + params.head[i].bias;
            if (trace) trace->head_pre.push_back(z);
            h = (i + 1 < params.head.size())
                    ? Vector(z.unaryExpr([](double v) { return gelu(v); }))
                    : z;
            if (trace) trace->head_post.push_back(h);
        }
        logits = h;
    }
    if (trace) trace->logits = logits;
    return logits;
}

Gradients zero_gradients(const HVNConfig& config) {
    Gradients g;
    g.taps.resize(static_cast<std::size_t>(config.layers));
    for (Eigen::Index t = 0; t < config.layers; ++t) {
        auto& layer = g.taps[static_cast<std::size_t>(t)];
        layer.resize(static_cast<std::size_t>(config.taps + 1));
        for (auto& w : layer) {
            w = Matrix::Zero(config.widths[static_cast<std::size_t>(t)],
                             config.widths[static_cast<std::size_t>(t) + 1]);
        }
    }
    Eigen::Index in = config.per_column_head ? config.widths[0] : config.widths.back();
    for (Eigen::Index h : config.head_hidden) {
        g.head.push_back({Matrix::Zero(in, h), Vector::Zero(h)});
        in = h;
    }
    g.head.push_back({Matrix::Zero(in, config.classes), Vector::Zero(config.classes)});
    return g;
}

namespace {

// Backpropagation through the dense head given d(logits); input is the head's
// input vector, returns d(input).
Vector head_backward(const HVNParams& params, const Vector& input,
                     const Vector& dlogits, std::vector<DenseLayer>& head_grads,
                     double weight) {
    // recompute the per-layer affine outputs
    std::vector<Vector> pre;
    std::vector<Vector> inputs;  // input to each head layer
    Vector h = input;
    for (std::size_t i = 0; i < params.head.size(); ++i) {
        inputs.push_back(h);
        Vector z = params.head[i].weight.transpose() * h + params.head[i].bias;
        pre.push_back(z);
        h = (i + 1 < params.head.size())
                ? Vector(z.unaryExpr([](double v) { return gelu(v); }))
                : z;
    }
    Vector dz = dlogits;
    for (std::size_t i = params.head.size(); i-- > 0;) {
        head_grads[i].weight.noalias() += weight * (inputs[i] * dz.transpose());
        head_grads[i].bias.noalias() += weight * dz;
        Vector dinput = params.head[i].weight * dz;
        if (i > 0) {
            const Vector& zprev = pre[i - 1];
            dz = dinput.cwiseProduct(
                zprev.unaryExpr([](double v) { return gelu_derivative(v); }));
        } else {
            dz = dinput;
        }
    }
    return dz;  // gradient with respect to the head input
}

}  // namespace

double backward(const HVNConfig& config, const HVNParams& params,
                const CovMatrix* c, const Matrix& x0, Eigen::Index label,
                Gradients& grads, double weight, Vector* logits_out) {
    ForwardTrace trace;
    Vector logits = hvn_forward(config, params, c, x0, &trace);
    if (logits_out) *logits_out = logits;
    double loss = cross_entropy(logits, label);

    Vector dlogits = softmax(logits);
    dlogits[label] -= 1.0;

    const CovMatrix* shift = config.identity_shift ? nullptr : c;
    Matrix dx;
    if (config.per_column_head) {
        const Matrix& x = trace.activations.back();
        double scale = 1.0 / static_cast<double>(x.cols());
        dx = Matrix::Zero(x.rows(), x.cols());
        for (Eigen::Index col = 0; col < x.cols(); ++col) {
            dx.col(col) =
                head_backward(params, x.col(col), dlogits * scale, grads.head, weight);
        }
    } else {
        Vector dpooled = head_backward(params, trace.pooled, dlogits, grads.head, weight);
        const Matrix& x_last = trace.activations.back();
        dx = Matrix::Zero(x_last.rows(), x_last.cols());
        dx.rowwise() = (dpooled / static_cast<double>(x_last.rows())).transpose();
    }

    for (Eigen::Index t = config.layers; t-- > 0;) {
        const auto& taps = params.taps[static_cast<std::size_t>(t)];
        auto& tap_grads = grads.taps[static_cast<std::size_t>(t)];
        const Matrix& pre = trace.preact[static_cast<std::size_t>(t)];
        Matrix da;
        if (config.nonlinearity == Nonlinearity::Gelu) {
            da = dx.cwiseProduct(
                pre.unaryExpr([](double v) { return gelu_derivative(v); }));
        } else {
            da = dx;
        }
        const auto& powers = trace.shifted[static_cast<std::size_t>(t)];
        for (std::size_t j = 0; j < taps.size(); ++j) {
            tap_grads[j].noalias() += weight * (powers[j].transpose() * da);
        }
        if (t == 0) break;  // the input itself needs no gradient
        // dX_t = sum_j C^j dA W_j^T (C symmetric)
        Matrix g = da;
        Matrix dprev = g * taps[0].transpose();
        for (std::size_t j = 1; j < taps.size(); ++j) {
            g = (shift != nullptr) ? Matrix(shift->inner.entries() * g) : g;
            dprev.noalias() += g * taps[j].transpose();
        }
        dx = std::move(dprev);
    }
    return loss;
}

Eigen::Index parameter_count(const HVNConfig& config) {
    config.validate();
    Eigen::Index total = 0;
    for (Eigen::Index t = 0; t < config.layers; ++t) {
        total += (config.taps + 1) * config.widths[static_cast<std::size_t>(t)] *
                 config.widths[static_cast<std::size_t>(t) + 1];
    }
    Eigen::Index in = config.per_column_head ? config.widths[0] : config.widths.back();
    for (Eigen::Index h : config.head_hidden) {
        total += in * h + h;
        in = h;
    }
    total += in * config.classes + config.classes;
    return total;
}

HVNConfig mlp_config(const HVNConfig& reference, Eigen::Index hidden) {
    HVNConfig mlp = reference;
    mlp.identity_shift = true;
    mlp.taps = 1;
    mlp.widths.assign(static_cast<std::size_t>(reference.layers) + 1, hidden);
    mlp.widths[0] = reference.widths[0];
    return mlp;
}

Eigen::Index matched_mlp_width(const HVNConfig& reference) {
    const Eigen::Index target = parameter_count(reference);
    Eigen::Index lo = 1, hi = 1;
    while (parameter_count(mlp_config(reference, hi)) < target && hi < (1 << 20)) {
        hi *= 2;
    }
    while (lo < hi) {
        Eigen::Index mid = (lo + hi) / 2;
        if (parameter_count(mlp_config(reference, mid)) < target) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    // lo is the smallest width at or above the target; its neighbor below may
    // be closer
    Eigen::Index best = lo;
    double best_err = std::abs(
        static_cast<double>(parameter_count(mlp_config(reference, lo))) / target - 1.0);
    if (lo > 1) {
        double err_below = std::abs(
            static_cast<double>(parameter_count(mlp_config(reference, lo - 1))) / target -
            1.0);
        if (err_below < best_err) {
            best = lo - 1;
            best_err = err_below;
        }
    }
    if (best_err > 0.05) {
        throw ConfigError("matched_mlp_width: no hidden width within 5% of " +
                          std::to_string(target) + " parameters");
    }
    return best;
}

HVNParams init_params(const HVNConfig& config, Rng& rng) {
    config.validate();
    HVNParams p;
    p.taps.resize(static_cast<std::size_t>(config.layers));
    for (Eigen::Index t = 0; t < config.layers; ++t) {
        Eigen::Index fin = config.widths[static_cast<std::size_t>(t)];
        Eigen::Index fout = config.widths[static_cast<std::size_t>(t) + 1];
        // fan scaling shared across the J+1 taps
        double bound = std::sqrt(6.0 / (static_cast<double>(config.taps + 1) *
                                        static_cast<double>(fin + fout)));
        auto& layer = p.taps[static_cast<std::size_t>(t)];
        layer.resize(static_cast<std::size_t>(config.taps + 1));
        for (auto& w : layer) {
            w.resize(fin, fout);
            for (Eigen::Index j = 0; j < fout; ++j)
                for (Eigen::Index i = 0; i < fin; ++i)
                    w(i, j) = bound * (2.0 * rng.uniform() - 1.0);
        }
    }
    Eigen::Index in = config.per_column_head ? config.widths[0] : config.widths.back();
    std::vector<Eigen::Index> dims(config.head_hidden.begin(), config.head_hidden.end());
    dims.push_back(config.classes);
    for (Eigen::Index out : dims) {
        double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        DenseLayer layer;
        layer.weight.resize(in, out);
        for (Eigen::Index j = 0; j < out; ++j)
            for (Eigen::Index i = 0; i < in; ++i)
                layer.weight(i, j) = bound * (2.0 * rng.uniform() - 1.0);
        layer.bias = Vector::Zero(out);
        p.head.push_back(std::move(layer));
        in = out;
    }
    return p;
}

AdamState init_adam(const HVNConfig& config) {
    AdamState s;
    Gradients z = zero_gradients(config);
    s.m_taps = z.taps;
    s.v_taps = z.taps;
    s.m_head = z.head;
    s.v_head = z.head;
    s.step = 0;
    return s;
}

namespace {

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v,
                 double lr, double b1, double b2, double eps, double bc1,
                 double bc2) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    Matrix mhat = m / bc1;
    Matrix vhat = v / bc2;
    param.array() -= lr * mhat.array() / (vhat.array().sqrt() + eps);
}

}  // namespace

void adam_step(HVNParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
    state.step += 1;
    double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t t = 0; t < params.taps.size(); ++t) {
        for (std::size_t j = 0; j < params.taps[t].size(); ++j) {
            adam_update(params.taps[t][j], grads.taps[t][j], state.m_taps[t][j],
                        state.v_taps[t][j], config.learning_rate, config.beta1,
                        config.beta2, config.epsilon, bc1, bc2);
        }
    }
    for (std::size_t i = 0; i < params.head.size(); ++i) {
        adam_update(params.head[i].weight, grads.head[i].weight,
                    state.m_head[i].weight, state.v_head[i].weight,
                    config.learning_rate, config.beta1, config.beta2,
                    config.epsilon, bc1, bc2);
        Matrix bias_grad = grads.head[i].bias;
        Matrix bias = params.head[i].bias;
        Matrix mb = state.m_head[i].bias, vb = state.v_head[i].bias;
        adam_update(bias, bias_grad, mb, vb, config.learning_rate, config.beta1,
                    config.beta2, config.epsilon, bc1, bc2);
        params.head[i].bias = bias;
        state.m_head[i].bias = mb;
        state.v_head[i].bias = vb;
    }
}

const CovMatrix* bag_cov(const Bag& bag, const CovMatrix* global_cov) {
    return bag.cov.has_value() ? &bag.cov.value() : global_cov;
}

double evaluate_accuracy(const HVNConfig& config, const HVNParams& params,
                         const std::vector<Bag>& bags, const CovMatrix* global_cov) {
    if (bags.empty()) throw InvalidInputError("evaluate_accuracy: empty set");
    Eigen::Index correct = 0;
    for (const Bag& bag : bags) {
        Vector logits =
            hvn_forward(config, params, bag_cov(bag, global_cov), bag.signals.columns);
        Eigen::Index pred = 0;
        logits.maxCoeff(&pred);
        if (pred == bag.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(bags.size());
}

TrainResult train(const HVNConfig& config, const TrainConfig& tc,
                  const std::vector<Bag>& train_set, const std::vector<Bag>& eval_set,
                  const CovMatrix* global_cov) {
    config.validate();
    tc.validate();
    if (train_set.empty()) throw InvalidInputError("train: empty training set");

    Rng rng(tc.seed);
    TrainResult result;
    result.params = init_params(config, rng);
    AdamState adam = init_adam(config);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    const std::size_t n = train_set.size();
    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        Eigen::Index correct = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(tc.batch_size)) {
            std::size_t stop = std::min(n, start + static_cast<std::size_t>(tc.batch_size));
            double inv = 1.0 / static_cast<double>(stop - start);
            Gradients grads = zero_gradients(config);
            for (std::size_t k = start; k < stop; ++k) {
                const Bag& bag = train_set[order[k]];
                Vector logits;
                loss_sum += backward(config, result.params, bag_cov(bag, global_cov),
                                     bag.signals.columns, bag.label, grads, inv, &logits);
                Eigen::Index pred = 0;
                logits.maxCoeff(&pred);
                if (pred == bag.label) ++correct;
            }
            adam_step(result.params, grads, adam, tc);
        }
        result.history.push_back(
            {loss_sum / static_cast<double>(n),
             static_cast<double>(correct) / static_cast<double>(n)});
    }
    if (!eval_set.empty()) {
        result.eval_accuracy = evaluate_accuracy(config, result.params, eval_set, global_cov);
    }
    return result;
}

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ofstream& out, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

void write_tensor(std::ofstream& out, const std::string& name, const Matrix& m) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(m.rows()));
    write_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) write_f64(out, m(i, j));
}

struct NamedTensor {
    std::string name;
    Matrix data;
};

NamedTensor read_tensor(std::ifstream& in) {
    std::uint32_t name_len = read_u32(in);
    if (!in || name_len > 4096) throw ParseError("checkpoint: bad tensor name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint32_t rows = read_u32(in);
    std::uint32_t cols = read_u32(in);
    if (!in || rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) {
        throw ParseError("checkpoint: bad tensor shape for " + name);
    }
    Matrix m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = read_f64(in);
    if (!in) throw ParseError("checkpoint: truncated tensor " + name);
    return {name, std::move(m)};
}

constexpr char kMagic[8] = {'H', 'V', 'N', 'C', 'K', 'P', 'T', '1'};

}  // namespace

void save_checkpoint(const std::string& path, const HVNParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_checkpoint: cannot open " + path);
    out.write(kMagic, 8);
    write_u32(out, static_cast<std::uint32_t>(params.taps.size()));
    write_u32(out, params.taps.empty()
                       ? 0u
                       : static_cast<std::uint32_t>(params.taps.front().size()));
    write_u32(out, static_cast<std::uint32_t>(params.head.size()));
    for (std::size_t t = 0; t < params.taps.size(); ++t) {
        for (std::size_t j = 0; j < params.taps[t].size(); ++j) {
            write_tensor(out, "layer" + std::to_string(t) + ".tap" + std::to_string(j),
                         params.taps[t][j]);
        }
    }
    for (std::size_t i = 0; i < params.head.size(); ++i) {
        write_tensor(out, "head" + std::to_string(i) + ".weight", params.head[i].weight);
        write_tensor(out, "head" + std::to_string(i) + ".bias",
                     Matrix(params.head[i].bias));
    }
    if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

HVNParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw ParseError("load_checkpoint: not a checkpoint file: " + path);
    }
    std::uint32_t layers = read_u32(in);
    std::uint32_t taps = read_u32(in);
    std::uint32_t head_layers = read_u32(in);
    if (!in) throw ParseError("load_checkpoint: truncated header");

    HVNParams p;
    p.taps.resize(layers);
    for (std::uint32_t t = 0; t < layers; ++t) {
        for (std::uint32_t j = 0; j < taps; ++j) {
            NamedTensor tensor = read_tensor(in);
            std::string want = "layer" + std::to_string(t) + ".tap" + std::to_string(j);
            if (tensor.name != want) {
                throw ParseError("load_checkpoint: expected " + want + ", found " +
                                 tensor.name);
            }
            p.taps[t].push_back(std::move(tensor.data));
        }
    }
    for (std::uint32_t i = 0; i < head_layers; ++i) {
        NamedTensor weight = read_tensor(in);
        NamedTensor bias = read_tensor(in);
        std::string want = "head" + std::to_string(i);
        if (weight.name != want + ".weight" || bias.name != want + ".bias") {
            throw ParseError("load_checkpoint: malformed head tensors at " + want);
        }
        if (bias.data.cols() != 1) {
            throw ParseError("load_checkpoint: head bias must be a column");
        }
        p.head.push_back({std::move(weight.data), Vector(bias.data.col(0))});
    }
    return p;
}

}  // namespace hvn
