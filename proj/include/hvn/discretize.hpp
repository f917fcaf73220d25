#pragma once

#include <functional>
#include <vector>

#include "hvn/linalg.hpp"

namespace hvn {

// Fine-grid stand-in for a d-channel signal on [0,1]: M uniform grid points
// t_a = a/M, left-point quadrature weight 1/M. Row a holds the channel values
// at t_a.
struct FunctionGrid {
    Matrix values;  // M x d

    FunctionGrid() = default;
    FunctionGrid(Eigen::Index grid_size, Eigen::Index channels)
        : values(Matrix::Zero(grid_size, channels)) {}
    explicit FunctionGrid(Matrix v);

    Eigen::Index grid_size() const { return values.rows(); }
    Eigen::Index channels() const { return values.cols(); }
    double weight() const { return 1.0 / static_cast<double>(values.rows()); }
};

// L2 surrogate inner product: (1/M) * sum over grid points and channels.
double grid_inner(const FunctionGrid& u, const FunctionGrid& v);
double grid_norm(const FunctionGrid& u);

// Channelwise bin-averaging over a uniform partition of [0,1] into p bins,
// flattened channel-fastest: index(j, c) = j * d + c (0-based). Requires the
// grid size to be divisible by p.
struct BinAverageOp {
    Eigen::Index p;
    Eigen::Index d;

    Eigen::Index m() const { return p * d; }
    Eigen::Index flat_index(Eigen::Index bin, Eigen::Index channel) const {
        return bin * d + channel;
    }
};

Signal bin_average_forward(const BinAverageOp& op, const FunctionGrid& x);
FunctionGrid bin_average_adjoint(const BinAverageOp& op, const Signal& a,
                                 Eigen::Index grid_size);

// Canonical projection of a finite sequence onto its first m coordinates,
// and its adjoint (zero-padded injection).
Signal canonical_projection(const Vector& x, Eigen::Index m);
Vector canonical_injection(const Signal& a, Eigen::Index length);

// Point-evaluation sampling in an RKHS. Signals are kernel expansions
// v = sum_i coeffs[i] * K(., centers[i]); sampling evaluates v at the stored
// locations. Construction validates kernel symmetry and PSD-ness of the Gram
// matrix at the locations.
class RkhsSampler {
public:
    using Kernel = std::function<double(double, double)>;

    RkhsSampler(Kernel kernel, Vector locations);

    const Vector& locations() const { return locations_; }
    Eigen::Index m() const { return locations_.size(); }

    Signal evaluate(const Vector& coeffs, const Vector& centers) const;

    // S* sigma(S v): pointwise nonlinearity pushed through the sampler; the
    // result is again an expansion over the sampler's own locations.
    Vector pointwise_nonlinearity(const Vector& coeffs, const Vector& centers,
                                  const std::function<double(double)>& sigma) const;

private:
    Kernel kernel_;
    Vector locations_;
};

// Max-abs deviation between the covariance matrix of the discretized samples
// and the discretized covariance operator (the two sides of the compression
// identity). Exact algebra; should be ~1e-12 for any input.
double check_compression_identity(const std::vector<FunctionGrid>& samples,
                                  const BinAverageOp& op);

}  // namespace hvn
