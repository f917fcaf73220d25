#pragma once

#include <Eigen/Dense>

#include "hvn/errors.hpp"

namespace hvn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Signal = Eigen::VectorXd;

// Dense real symmetric matrix. Construction validates symmetry (absolute
// tolerance 1e-12) and finiteness, then stores the exactly symmetrized form.
class SymMatrix {
public:
    static constexpr double kSymTol = 1e-12;

    explicit SymMatrix(const Matrix& entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& entries() const { return entries_; }

    static SymMatrix identity(Eigen::Index dim) {
        return SymMatrix(Matrix::Identity(dim, dim));
    }

private:
    Matrix entries_;
};

// Eigendecomposition of a SymMatrix: eigenvalues sorted descending,
// eigenvector columns aligned, Q orthonormal, a = Q diag(values) Q^T.
struct EigenSystem {
    Vector eigenvalues;
    Matrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

// Coefficients of a polynomial filter: coeffs[k] multiplies C^k.
// coeffs_lo, when nonempty, holds compensation terms from a
// higher-precision construction; evaluation consumes both so that
// near-cancelling coefficient sets (the Lagrange projector filters) keep
// their root structure. An empty coeffs_lo means the doubles are exact.
struct PolyCoeffs {
    Vector coeffs;
    Vector coeffs_lo;

    Eigen::Index degree() const { return coeffs.size() - 1; }
    double evaluate(double t) const;
};

// Two eigenvalues belong to the same distinct value when
// |a - b| <= 1e-8 * max(1, lambda_max).
inline double eigen_tie_tolerance(double lambda_max) {
    return 1e-8 * std::max(1.0, lambda_max);
}

// Cyclic Jacobi eigendecomposition. Deterministic sweep order; converges when
// the off-diagonal Frobenius norm drops below 1e-12 * ||a||_F (at most 100
// sweeps). With psd_clamp, eigenvalues in [-1e-10, 0] are clamped to zero.
// Eigenvector sign convention: first component with magnitude above
// 1e-12 * max|v| is made positive, so repeated runs agree exactly.
EigenSystem sym_eigendecomp(const SymMatrix& a, bool psd_clamp = false);

// Lower-triangular L with L L^T = a + jitter * I. Throws NotPsdError when a
// pivot is non-positive after the jitter.
Matrix cholesky_psd(const SymMatrix& a, double jitter);

// Horner evaluation of sum_j w_j C^j x. Never forms C^j; cost O(J dim^2 F).
Matrix matrix_poly_apply(const SymMatrix& c, const PolyCoeffs& w, const Matrix& x);
Vector matrix_poly_apply(const SymMatrix& c, const PolyCoeffs& w, const Vector& x);

// Coefficients of the scaled Lagrange polynomial on nodes ∪ {0}:
//   L(t) = (t / target) * prod_{b != target} (t - b) / (target - b),
// so L(target) = 1, L(b) = 0 for other nodes, L(0) = 0. Built by expanding
// the linear factors. Nodes must be positive and pairwise distinct (relative
// gap > 1e-10); target must be one of them.
PolyCoeffs lagrange_poly_coeffs(const Vector& nodes, double target);

}  // namespace hvn
