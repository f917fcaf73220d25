#include "hvn/linalg.hpp"
#include <limits>

#include <cmath>
#include <numeric>
#include <vector>

namespace hvn {

SymMatrix::SymMatrix(const Matrix& entries) {
    if (entries.rows() != entries.cols() || entries.rows() == 0) {
        throw ShapeError("SymMatrix: expected a nonempty square matrix, got " +
                         std::to_string(entries.rows()) + "x" +
                         std::to_string(entries.cols()));
    }
    if (!entries.allFinite()) {
        throw InvalidInputError("SymMatrix: non-finite entries");
    }
    double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymTol) {
        throw InvalidInputError("SymMatrix: asymmetry " + std::to_string(asym) +
                                " exceeds tolerance");
    }
    entries_ = 0.5 * (entries + entries.transpose());
}

namespace {

// Error-free transformations. Lagrange filters on spread-out spectra have
// monomial coefficients whose partial sums cancel by many orders of
// magnitude; both the coefficients and the Horner recurrences are handled
// in compensated (double-double) arithmetic so the projector identities
// survive in the monomial representation.
struct Dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline Dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline Dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline Dd dd_add(const Dd& a, const Dd& b) {
    Dd s = two_sum(a.hi, b.hi);
    double lo = a.lo + b.lo + s.lo;
    double hi = s.hi + lo;
    return {hi, lo - (hi - s.hi)};
}

inline Dd dd_mul_d(const Dd& a, double b) {
    Dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    double hi = p.hi + p.lo;
    return {hi, p.lo - (hi - p.hi)};
}

inline Dd dd_div_d(const Dd& a, double b) {
    double q1 = a.hi / b;
    Dd r = two_prod(q1, -b);
    double rem = (a.hi + r.hi) + r.lo + a.lo;
    double q2 = rem / b;
    Dd q = two_sum(q1, q2);
    return q;
}

}  // namespace

double PolyCoeffs::evaluate(double t) const {
    const bool compensated = coeffs_lo.size() == coeffs.size();
    Dd acc{0.0, 0.0};
    for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) {
        acc = dd_mul_d(acc, t);
        acc = dd_add(acc, Dd{coeffs[k], compensated ? coeffs_lo[k] : 0.0});
    }
    return acc.hi + acc.lo;
}

namespace {

// One cyclic Jacobi sweep over the strict upper triangle of b, accumulating
// rotations into v.
void jacobi_sweep(Matrix& b, Matrix& v) {
    const Eigen::Index n = b.rows();
    for (Eigen::Index p = 0; p < n - 1; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
            double apq = b(p, q);
            if (apq == 0.0) continue;
            double theta = (b(q, q) - b(p, p)) / (2.0 * apq);
            double t = std::copysign(1.0, theta) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            double c = 1.0 / std::sqrt(t * t + 1.0);
            double s = t * c;

            // b <- J^T b J: rotate columns p,q, then rows p,q.
            for (Eigen::Index k = 0; k < n; ++k) {
                double bkp = b(k, p), bkq = b(k, q);
                b(k, p) = c * bkp - s * bkq;
                b(k, q) = s * bkp + c * bkq;
            }
            for (Eigen::Index k = 0; k < n; ++k) {
                double bpk = b(p, k), bqk = b(q, k);
                b(p, k) = c * bpk - s * bqk;
                b(q, k) = s * bpk + c * bqk;
            }
            // The rotation annihilates the pivot pair by construction.
            b(p, q) = 0.0;
            b(q, p) = 0.0;

            for (Eigen::Index k = 0; k < n; ++k) {
                double vkp = v(k, p), vkq = v(k, q);
                v(k, p) = c * vkp - s * vkq;
                v(k, q) = s * vkp + c * vkq;
            }
        }
    }
}

double offdiag_frobenius(const Matrix& b) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            if (i != j) acc += b(i, j) * b(i, j);
        }
    }
    return std::sqrt(acc);
}

void fix_eigenvector_signs(Matrix& q) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        double scale = q.col(j).cwiseAbs().maxCoeff();
        if (scale == 0.0) continue;
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            if (std::abs(q(i, j)) > 1e-12 * scale) {
                if (q(i, j) < 0.0) q.col(j) = -q.col(j);
                break;
            }
        }
    }
}

}  // namespace

EigenSystem sym_eigendecomp(const SymMatrix& a, bool psd_clamp) {
    const Eigen::Index n = a.dim();
    Matrix b = a.entries();
    Matrix v = Matrix::Identity(n, n);

    const double norm_a = b.norm();
    // Convergence requires off-diagonal Frobenius <= 1e-12 * ||a||_F; once
    // past it, Jacobi's quadratic convergence buys machine precision in one
    // or two extra sweeps, which the eigenvector accuracy of closely spaced
    // eigenvalues depends on.
    const double required = 1e-12 * norm_a;
    const double polished = 1e-15 * norm_a;
    constexpr int kMaxSweeps = 100;

    double prev_off = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = offdiag_frobenius(b);
        if (off <= polished) break;
        if (off >= prev_off && off <= required) break;  // stalled below the bar
        jacobi_sweep(b, v);
        prev_off = off;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return b(i, i) > b(j, j);
    });

    EigenSystem es;
    es.eigenvalues.resize(n);
    es.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        es.eigenvalues[k] = b(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        es.eigenvectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    if (psd_clamp) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (es.eigenvalues[k] < 0.0 && es.eigenvalues[k] >= -1e-10) {
                es.eigenvalues[k] = 0.0;
            }
        }
    }
    fix_eigenvector_signs(es.eigenvectors);
    return es;
}

Matrix cholesky_psd(const SymMatrix& a, double jitter) {
    if (jitter < 0.0) {
        throw InvalidInputError("cholesky_psd: jitter must be nonnegative");
    }
    const Eigen::Index n = a.dim();
    const Matrix& m = a.entries();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = m(j, j) + jitter - l.row(j).head(j).squaredNorm();
        if (d <= 0.0) {
            throw NotPsdError("cholesky_psd: pivot " + std::to_string(d) +
                              " at column " + std::to_string(j));
        }
        l(j, j) = std::sqrt(d);
        Eigen::Index r = n - j - 1;
        if (r > 0) {
            l.col(j).tail(r) =
                (m.col(j).tail(r) -
                 l.bottomLeftCorner(r, j) * l.row(j).head(j).transpose()) /
                l(j, j);
        }
    }
    return l;
}

Matrix matrix_poly_apply(const SymMatrix& c, const PolyCoeffs& w, const Matrix& x) {
    if (w.coeffs.size() < 1) {
        throw InvalidInputError("matrix_poly_apply: empty coefficient vector");
    }
    if (!w.coeffs.allFinite()) {
        throw InvalidInputError("matrix_poly_apply: non-finite coefficients");
    }
    if (c.dim() != x.rows()) {
        throw ShapeError("matrix_poly_apply: C is " + std::to_string(c.dim()) +
                         "-dim but x has " + std::to_string(x.rows()) + " rows");
    }
    const Eigen::Index n = x.rows(), f = x.cols();
    const Eigen::Index j_max = w.coeffs.size() - 1;
    const bool compensated = w.coeffs_lo.size() == w.coeffs.size();
    const Matrix& cm = c.entries();
    auto coef = [&](Eigen::Index j) {
        return Dd{w.coeffs[j], compensated ? w.coeffs_lo[j] : 0.0};
    };

    // Horner: S <- C S + w_j X, with S held as a hi/lo matrix pair.
    Matrix shi(n, f), slo(n, f);
    for (Eigen::Index col = 0; col < f; ++col) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Dd v = dd_mul_d(coef(j_max), x(i, col));
            shi(i, col) = v.hi;
            slo(i, col) = v.lo;
        }
    }
    Matrix nhi(n, f), nlo(n, f);
    for (Eigen::Index j = j_max - 1; j >= 0; --j) {
        for (Eigen::Index col = 0; col < f; ++col) {
            for (Eigen::Index i = 0; i < n; ++i) {
                Dd acc = dd_mul_d(coef(j), x(i, col));
                for (Eigen::Index k = 0; k < n; ++k) {
                    Dd term = two_prod(cm(i, k), shi(k, col));
                    term.lo += cm(i, k) * slo(k, col);
                    acc = dd_add(acc, term);
                }
                nhi(i, col) = acc.hi;
                nlo(i, col) = acc.lo;
            }
        }
        shi.swap(nhi);
        slo.swap(nlo);
    }
    return shi + slo;
}

Vector matrix_poly_apply(const SymMatrix& c, const PolyCoeffs& w, const Vector& x) {
    Matrix out = matrix_poly_apply(c, w, Matrix(x));
    return Vector(out.col(0));
}

PolyCoeffs lagrange_poly_coeffs(const Vector& nodes, double target) {
    const Eigen::Index q = nodes.size();
    if (q == 0) {
        throw DegeneracyError("lagrange_poly_coeffs: empty node set");
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        if (!(nodes[i] > 0.0) || !std::isfinite(nodes[i])) {
            throw InvalidInputError("lagrange_poly_coeffs: nodes must be positive reals");
        }
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = i + 1; j < q; ++j) {
            double gap = std::abs(nodes[i] - nodes[j]) / std::max(nodes[i], nodes[j]);
            if (gap <= 1e-10) {
                throw DegeneracyError("lagrange_poly_coeffs: nodes " + std::to_string(i) +
                                      " and " + std::to_string(j) + " coincide");
            }
        }
    }
    Eigen::Index target_idx = -1;
    for (Eigen::Index i = 0; i < q; ++i) {
        if (std::abs(nodes[i] - target) <= 1e-12 * std::max(1.0, std::abs(target))) {
            target_idx = i;
            break;
        }
    }
    if (target_idx < 0) {
        throw InvalidInputError("lagrange_poly_coeffs: target is not a node");
    }
    const double alpha = nodes[target_idx];

    // Start from t/alpha, then fold in (t - b)/(alpha - b) per other node.
    // The expansion runs in compensated arithmetic: the roots of the factored
    // form are only preserved in the monomial coefficients when those carry
    // more than double precision.
    std::vector<Dd> coeffs(static_cast<std::size_t>(q + 1));
    coeffs[1] = dd_div_d(Dd{1.0, 0.0}, alpha);
    Eigen::Index deg = 1;
    for (Eigen::Index i = 0; i < q; ++i) {
        if (i == target_idx) continue;
        const double b = nodes[i];
        const double denom = alpha - b;
        std::vector<Dd> next(static_cast<std::size_t>(q + 1));
        for (Eigen::Index k = deg; k >= 0; --k) {
            Dd scaled = dd_div_d(coeffs[static_cast<std::size_t>(k)], denom);
            next[static_cast<std::size_t>(k + 1)] =
                dd_add(next[static_cast<std::size_t>(k + 1)], scaled);
            next[static_cast<std::size_t>(k)] =
                dd_add(next[static_cast<std::size_t>(k)], dd_mul_d(scaled, -b));
        }
        coeffs = std::move(next);
        ++deg;
    }
    PolyCoeffs out;
    out.coeffs.resize(q + 1);
    out.coeffs_lo.resize(q + 1);
    for (Eigen::Index k = 0; k <= q; ++k) {
        out.coeffs[k] = coeffs[static_cast<std::size_t>(k)].hi;
        out.coeffs_lo[k] = coeffs[static_cast<std::size_t>(k)].lo;
    }
    return out;
}

}  // namespace hvn
