#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hvn/covariance.hpp"
#include "hvn/linalg.hpp"
#include "hvn/rng.hpp"

namespace hvn {

enum class Nonlinearity { Gelu, Identity };

// Architecture of a covariance network: T polynomial layers followed by mean
// pooling and a dense classifier head. The MLP baseline is the same machine
// with identity_shift (the covariance is replaced by I, so components never
// mix). per_column_head turns the whole network into a per-sample classifier
// whose logits are averaged over the batch columns; the FPCA baseline uses
// that with zero layers.
struct HVNConfig {
    Eigen::Index layers = 2;
    Eigen::Index taps = 2;
    std::vector<Eigen::Index> widths;  // F_0..F_T, size layers + 1
    Nonlinearity nonlinearity = Nonlinearity::Gelu;
    std::vector<Eigen::Index> head_hidden = {64};
    Eigen::Index classes = 2;
    bool identity_shift = false;
    bool per_column_head = false;

    void validate() const;
    Eigen::Index feature_dim() const { return widths.back(); }
};

struct DenseLayer {
    Matrix weight;  // in x out
    Vector bias;    // out
};

struct HVNParams {
    std::vector<std::vector<Matrix>> taps;  // [layer][j]: F_t x F_{t+1}
    std::vector<DenseLayer> head;
};

// Exact Gaussian-CDF form x * Phi(x) and its derivative.
double gelu(double x);
double gelu_derivative(double x);

// Columnwise mean over the m components.
Vector mean_pool(const Matrix& x);

// -log softmax(logits)[label], computed with max subtraction.
double cross_entropy(const Vector& logits, Eigen::Index label);
Vector softmax(const Vector& logits);

// One polynomial layer: sigma(sum_j C^j X W_j), powers by iterated
// multiplication. A null covariance means identity shift.
Matrix hvn_layer_forward(const CovMatrix* c, const Matrix& x,
                         const std::vector<Matrix>& weights, Nonlinearity nl);

// Dense classifier head: affine -> GELU between layers, affine at the end.
Vector head_forward(const std::vector<DenseLayer>& head, const Vector& input);

// Everything the backward pass needs from a forward evaluation.
struct ForwardTrace {
    std::vector<std::vector<Matrix>> shifted;  // [layer][j]: C^j X_t
    std::vector<Matrix> preact;                // [layer]: pre-nonlinearity
    std::vector<Matrix> activations;           // X_0 .. X_T
    Vector pooled;
    std::vector<Vector> head_pre;   // affine outputs per head layer
    std::vector<Vector> head_post;  // after activation; last entry equals logits
    Vector logits;
};

Vector hvn_forward(const HVNConfig& config, const HVNParams& params,
                   const CovMatrix* c, const Matrix& x0,
                   ForwardTrace* trace = nullptr);

struct Gradients {
    std::vector<std::vector<Matrix>> taps;
    std::vector<DenseLayer> head;
};

// Reverse-mode gradients of the cross-entropy of one bag; returns the loss.
// Accumulates into grads (scaled by weight), so batches sum naturally.
double backward(const HVNConfig& config, const HVNParams& params,
                const CovMatrix* c, const Matrix& x0, Eigen::Index label,
                Gradients& grads, double weight, Vector* logits_out = nullptr);

Gradients zero_gradients(const HVNConfig& config);

// Total trainable scalars: sum_t (J+1) F_t F_{t+1} plus the head.
Eigen::Index parameter_count(const HVNConfig& config);

// MLP baseline with hidden width h: identity shift, J = 1, all intermediate
// widths h, same head and classes.
HVNConfig mlp_config(const HVNConfig& reference, Eigen::Index hidden);
// Smallest hidden width whose parameter count is within 5% of the
// reference's; throws ConfigError when no width qualifies.
Eigen::Index matched_mlp_width(const HVNConfig& reference);

HVNParams init_params(const HVNConfig& config, Rng& rng);

struct AdamState {
    std::vector<std::vector<Matrix>> m_taps, v_taps;
    std::vector<DenseLayer> m_head, v_head;
    std::int64_t step = 0;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 200;
    Eigen::Index batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const;
};

AdamState init_adam(const HVNConfig& config);
void adam_step(HVNParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

struct TrainResult {
    HVNParams params;
    std::vector<EpochStats> history;  // per-epoch training loss/accuracy
    double eval_accuracy = 0.0;       // final accuracy on the eval set
};

// Forward input for a bag: its signal columns. Per-bag covariance wins over
// the global one; identity-shift configs ignore both.
const CovMatrix* bag_cov(const Bag& bag, const CovMatrix* global_cov);

double evaluate_accuracy(const HVNConfig& config, const HVNParams& params,
                         const std::vector<Bag>& bags, const CovMatrix* global_cov);

TrainResult train(const HVNConfig& config, const TrainConfig& tc,
                  const std::vector<Bag>& train_set, const std::vector<Bag>& eval_set,
                  const CovMatrix* global_cov);

// Checkpoints: binary, magic "HVNCKPT1", little-endian; per tensor a name,
// rows, cols and row-major f64 payload. Layout documented in the README.
void save_checkpoint(const std::string& path, const HVNParams& params);
HVNParams load_checkpoint(const std::string& path);

}  // namespace hvn
