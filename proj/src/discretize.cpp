#include "hvn/discretize.hpp"

#include <cmath>

#include "hvn/covariance.hpp"

namespace hvn {

FunctionGrid::FunctionGrid(Matrix v) : values(std::move(v)) {
    if (values.rows() == 0 || values.cols() == 0) {
        throw ShapeError("FunctionGrid: empty grid");
    }
    if (!values.allFinite()) {
        throw InvalidInputError("FunctionGrid: non-finite values");
    }
}

double grid_inner(const FunctionGrid& u, const FunctionGrid& v) {
    if (u.grid_size() != v.grid_size() || u.channels() != v.channels()) {
        throw ShapeError("grid_inner: shape mismatch");
    }
    return u.weight() * (u.values.array() * v.values.array()).sum();
}

double grid_norm(const FunctionGrid& u) { return std::sqrt(grid_inner(u, u)); }

Signal bin_average_forward(const BinAverageOp& op, const FunctionGrid& x) {
    if (x.channels() != op.d) {
        throw ShapeError("bin_average_forward: channel count mismatch");
    }
    if (op.p <= 0 || x.grid_size() % op.p != 0) {
        throw InvalidInputError("bin_average_forward: grid size " +
                                std::to_string(x.grid_size()) +
                                " is not divisible into " + std::to_string(op.p) +
                                " bins");
    }
    const Eigen::Index per_bin = x.grid_size() / op.p;
    const double delta = x.weight();
    // (1/sqrt(1/p)) * integral over the bin = sqrt(p) * delta * bin sum
    const double scale = std::sqrt(static_cast<double>(op.p)) * delta;
    Signal out(op.m());
    for (Eigen::Index j = 0; j < op.p; ++j) {
        for (Eigen::Index c = 0; c < op.d; ++c) {
            out[op.flat_index(j, c)] =
                scale * x.values.col(c).segment(j * per_bin, per_bin).sum();
        }
    }
    return out;
}

FunctionGrid bin_average_adjoint(const BinAverageOp& op, const Signal& a,
                                 Eigen::Index grid_size) {
    if (a.size() != op.m()) {
        throw ShapeError("bin_average_adjoint: expected signal of length " +
                         std::to_string(op.m()));
    }
    if (op.p <= 0 || grid_size % op.p != 0) {
        throw InvalidInputError("bin_average_adjoint: grid size not divisible");
    }
    const Eigen::Index per_bin = grid_size / op.p;
    // representer s_(j,c) is sqrt(p) * indicator of bin j on channel c
    const double height = std::sqrt(static_cast<double>(op.p));
    FunctionGrid out(grid_size, op.d);
    for (Eigen::Index j = 0; j < op.p; ++j) {
        for (Eigen::Index c = 0; c < op.d; ++c) {
            out.values.col(c).segment(j * per_bin, per_bin).setConstant(
                height * a[op.flat_index(j, c)]);
        }
    }
    return out;
}

Signal canonical_projection(const Vector& x, Eigen::Index m) {
    if (m > x.size()) {
        throw ShapeError("canonical_projection: m = " + std::to_string(m) +
                         " exceeds sequence length " + std::to_string(x.size()));
    }
    return x.head(m);
}

Vector canonical_injection(const Signal& a, Eigen::Index length) {
    if (length < a.size()) {
        throw ShapeError("canonical_injection: target length shorter than signal");
    }
    Vector out = Vector::Zero(length);
    out.head(a.size()) = a;
    return out;
}

RkhsSampler::RkhsSampler(Kernel kernel, Vector locations)
    : kernel_(std::move(kernel)), locations_(std::move(locations)) {
    if (locations_.size() == 0) {
        throw InvalidInputError("RkhsSampler: no sampling locations");
    }
    const Eigen::Index m = locations_.size();
    Matrix gram(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            gram(i, j) = kernel_(locations_[i], locations_[j]);
        }
    }
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw InvalidInputError("RkhsSampler: kernel is not symmetric");
    }
    auto es = sym_eigendecomp(SymMatrix{gram});
    if (es.eigenvalues.minCoeff() < -1e-10) {
        throw NotPsdError("RkhsSampler: Gram matrix has eigenvalue " +
                          std::to_string(es.eigenvalues.minCoeff()));
    }
}

Signal RkhsSampler::evaluate(const Vector& coeffs, const Vector& centers) const {
    if (coeffs.size() != centers.size()) {
        throw ShapeError("RkhsSampler::evaluate: coeffs/centers length mismatch");
    }
    Signal out = Signal::Zero(m());
    for (Eigen::Index j = 0; j < m(); ++j) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
            acc += coeffs[i] * kernel_(locations_[j], centers[i]);
        }
        out[j] = acc;
    }
    return out;
}

Vector RkhsSampler::pointwise_nonlinearity(
    const Vector& coeffs, const Vector& centers,
    const std::function<double(double)>& sigma) const {
    Signal sampled = evaluate(coeffs, centers);
    return sampled.unaryExpr(sigma);
}

double check_compression_identity(const std::vector<FunctionGrid>& samples,
                                  const BinAverageOp& op) {
    if (samples.size() < 2) {
        throw SampleSizeError("check_compression_identity: need at least 2 samples");
    }
    const Eigen::Index grid_size = samples.front().grid_size();
    for (const auto& s : samples) {
        if (s.grid_size() != grid_size || s.channels() != op.d) {
            throw ShapeError("check_compression_identity: inconsistent sample shapes");
        }
    }
    const Eigen::Index m = op.m();
    const Eigen::Index n = static_cast<Eigen::Index>(samples.size());

    // Path one: discretize, then form the covariance matrix.
    Matrix discretized(m, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        discretized.col(i) = bin_average_forward(op, samples[static_cast<std::size_t>(i)]);
    }
    CovMatrix direct = empirical_cov_matrix(SignalBatch{discretized});

    // Path two: push each basis vector through S*, the covariance operator,
    // and S.
    Matrix conjugated(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        Signal basis = Signal::Zero(m);
        basis[k] = 1.0;
        FunctionGrid lifted = bin_average_adjoint(op, basis, grid_size);
        FunctionGrid pushed = empirical_cov_operator_apply(samples, lifted);
        conjugated.col(k) = bin_average_forward(op, pushed);
    }

    return (direct.inner.entries() - conjugated).cwiseAbs().maxCoeff();
}

}  // namespace hvn
