#pragma once

#include <optional>
#include <vector>

#include "hvn/discretize.hpp"
#include "hvn/linalg.hpp"

namespace hvn {

// A batch of discretized signals, one per column.
struct SignalBatch {
    Matrix columns;  // m x n

    SignalBatch() = default;
    explicit SignalBatch(Matrix cols);

    Eigen::Index m() const { return columns.rows(); }
    Eigen::Index n() const { return columns.cols(); }
};

// Empirical covariance matrix with its rank bound (n - 1).
struct CovMatrix {
    SymMatrix inner;
    Eigen::Index rank_bound;

    Eigen::Index dim() const { return inner.dim(); }
};

// (1/n) sum_i (x_i - mean)(x_i - mean)^T. Requires n >= 2.
CovMatrix empirical_cov_matrix(const SignalBatch& batch);

// Empirical covariance operator on the fine grid:
// C v = (1/n) sum_i <x_i - mean, v> (x_i - mean). Requires n >= 2.
FunctionGrid empirical_cov_operator_apply(const std::vector<FunctionGrid>& samples,
                                          const FunctionGrid& v);

// Division by the largest eigenvalue (power iteration) so the spectral
// radius is at most 1; matrices with lambda_max <= 1e-12 pass through.
CovMatrix normalize_cov(const CovMatrix& c);

// Largest eigenvalue via power iteration (tolerance 1e-10, 500 iterations,
// deterministic start vector).
double spectral_radius(const SymMatrix& a);

// Classification unit: a batch of signals sharing one label. cov, when
// present, is the bag's own (normalized) covariance; otherwise consumers
// fall back to a dataset-level matrix.
struct Bag {
    SignalBatch signals;
    Eigen::Index label = 0;
    std::optional<CovMatrix> cov;
};

}  // namespace hvn
