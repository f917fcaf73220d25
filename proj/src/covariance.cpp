#include "hvn/covariance.hpp"

#include <cmath>

namespace hvn {

SignalBatch::SignalBatch(Matrix cols) : columns(std::move(cols)) {
    if (columns.rows() == 0 || columns.cols() == 0) {
        throw ShapeError("SignalBatch: empty batch");
    }
    if (!columns.allFinite()) {
        throw InvalidInputError("SignalBatch: non-finite entries");
    }
}

CovMatrix empirical_cov_matrix(const SignalBatch& batch) {
    const Eigen::Index n = batch.n();
    if (n < 2) {
        throw SampleSizeError("empirical_cov_matrix: need n >= 2, got " +
                              std::to_string(n));
    }
    Vector mean = batch.columns.rowwise().mean();
    Matrix centered = batch.columns.colwise() - mean;
    Matrix c = centered * centered.transpose() / static_cast<double>(n);
    // exact symmetry regardless of GEMM rounding
    c = 0.5 * (c + c.transpose());
    return CovMatrix{SymMatrix{c}, n - 1};
}

FunctionGrid empirical_cov_operator_apply(const std::vector<FunctionGrid>& samples,
                                          const FunctionGrid& v) {
    const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
    if (n < 2) {
        throw SampleSizeError("empirical_cov_operator_apply: need n >= 2");
    }
    const Eigen::Index grid_size = samples.front().grid_size();
    const Eigen::Index channels = samples.front().channels();
    if (v.grid_size() != grid_size || v.channels() != channels) {
        throw ShapeError("empirical_cov_operator_apply: shape mismatch");
    }
    Matrix mean = Matrix::Zero(grid_size, channels);
    for (const auto& s : samples) {
        if (s.grid_size() != grid_size || s.channels() != channels) {
            throw ShapeError("empirical_cov_operator_apply: inconsistent samples");
        }
        mean += s.values;
    }
    mean /= static_cast<double>(n);

    FunctionGrid out(grid_size, channels);
    FunctionGrid centered(grid_size, channels);
    for (const auto& s : samples) {
        centered.values = s.values - mean;
        double coef = grid_inner(centered, v);
        out.values += coef * centered.values;
    }
    out.values /= static_cast<double>(n);
    return out;
}

double spectral_radius(const SymMatrix& a) {
    const Eigen::Index n = a.dim();
    // Deterministic start with weak structure so it is rarely orthogonal to
    // the top eigenvector.
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
    }
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        Vector av = a.entries() * v;
        double norm = av.norm();
        if (norm == 0.0) return 0.0;
        lambda = v.dot(av);
        double residual = (av - lambda * v).norm();
        if (residual <= 1e-10 * std::max(1.0, std::abs(lambda))) {
            break;
        }
        v = av / norm;
    }
    return std::abs(lambda);
}

CovMatrix normalize_cov(const CovMatrix& c) {
    double lambda_max = spectral_radius(c.inner);
    if (lambda_max <= 1e-12) {
        return c;
    }
    return CovMatrix{SymMatrix{c.inner.entries() / lambda_max}, c.rank_bound};
}

}  // namespace hvn
