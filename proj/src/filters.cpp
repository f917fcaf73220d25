#include "hvn/filters.hpp"

#include <cmath>

namespace hvn {

void validate_response(const SpectralResponse& resp, double lambda_max) {
    if (!resp.h) {
        throw InvalidInputError("SpectralResponse: missing callable");
    }
    if (!std::isfinite(resp.h_at_zero)) {
        throw InvalidInputError("SpectralResponse: h(0) is not finite");
    }
    const int kProbes = 1000;
    double hi = std::max(lambda_max, 0.0);
    for (int i = 0; i <= kProbes; ++i) {
        double lambda = hi * static_cast<double>(i) / static_cast<double>(kProbes);
        if (!std::isfinite(resp.h(lambda))) {
            throw InvalidInputError("SpectralResponse: h(" + std::to_string(lambda) +
                                    ") is not finite");
        }
    }
}

Eigen::Index DistinctSpectrum::find(double alpha) const {
    double tol = values.size() > 0 ? eigen_tie_tolerance(values[0]) : 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - alpha) <= tol) return i;
    }
    throw InvalidInputError("DistinctSpectrum: " + std::to_string(alpha) +
                            " is not a distinct eigenvalue");
}

double default_zero_cutoff(const EigenSystem& es) {
    double lambda_max = es.eigenvalues.size() > 0 ? es.eigenvalues[0] : 0.0;
    return 1e-10 * std::max(lambda_max, 0.0);
}

DistinctSpectrum distinct_spectrum(const EigenSystem& es) {
    return distinct_spectrum(es, default_zero_cutoff(es));
}

DistinctSpectrum distinct_spectrum(const EigenSystem& es, double zero_cutoff) {
    DistinctSpectrum out;
    out.zero_cutoff = zero_cutoff;
    if (es.eigenvalues.size() == 0 || es.eigenvalues[0] <= zero_cutoff) {
        out.values.resize(0);
        return out;
    }
    double tol = eigen_tie_tolerance(es.eigenvalues[0]);
    std::vector<double> reps;
    for (Eigen::Index l = 0; l < es.eigenvalues.size(); ++l) {
        double lambda = es.eigenvalues[l];
        if (lambda <= zero_cutoff) continue;
        if (!reps.empty() && std::abs(lambda - reps.back()) <= tol) {
            out.groups.back().push_back(l);
        } else {
            reps.push_back(lambda);
            out.groups.push_back({l});
        }
    }
    out.values.resize(static_cast<Eigen::Index>(reps.size()));
    for (std::size_t i = 0; i < reps.size(); ++i) {
        out.values[static_cast<Eigen::Index>(i)] = reps[i];
    }
    return out;
}

Vector hvft(const EigenSystem& es, const Signal& x) {
    if (x.size() != es.dim()) {
        throw ShapeError("hvft: signal length does not match the eigensystem");
    }
    return es.eigenvectors.transpose() * x;
}

Signal spectral_filter_apply(const EigenSystem& es, const SpectralResponse& resp,
                             const Signal& x, double zero_cutoff) {
    if (x.size() != es.dim()) {
        throw ShapeError("spectral_filter_apply: shape mismatch");
    }
    double lambda_max = es.eigenvalues.size() > 0 ? std::max(es.eigenvalues[0], 0.0) : 0.0;
    validate_response(resp, lambda_max);

    Signal out = Signal::Zero(x.size());
    Signal projected = Signal::Zero(x.size());
    for (Eigen::Index l = 0; l < es.dim(); ++l) {
        if (es.eigenvalues[l] <= zero_cutoff) continue;
        double coef = es.eigenvectors.col(l).dot(x);
        out += resp.h(es.eigenvalues[l]) * coef * es.eigenvectors.col(l);
        projected += coef * es.eigenvectors.col(l);
    }
    out += resp.h_at_zero * (x - projected);
    return out;
}

Signal spectral_filter_apply(const EigenSystem& es, const SpectralResponse& resp,
                             const Signal& x) {
    return spectral_filter_apply(es, resp, x, default_zero_cutoff(es));
}

Signal spatial_filter_apply(const CovMatrix& c, const PolyCoeffs& w, const Signal& x) {
    return matrix_poly_apply(c.inner, w, x);
}

Matrix spatial_filter_apply(const CovMatrix& c, const PolyCoeffs& w, const Matrix& x) {
    return matrix_poly_apply(c.inner, w, x);
}

SymMatrix eigenprojector(const EigenSystem& es, const DistinctSpectrum& spectrum,
                         double alpha) {
    Eigen::Index which = spectrum.find(alpha);
    Matrix p = Matrix::Zero(es.dim(), es.dim());
    for (Eigen::Index l : spectrum.groups[static_cast<std::size_t>(which)]) {
        p.noalias() += es.eigenvectors.col(l) * es.eigenvectors.col(l).transpose();
    }
    return SymMatrix{0.5 * (p + p.transpose())};
}

PolyCoeffs eigenprojector_filter(const DistinctSpectrum& spectrum, double alpha) {
    if (spectrum.count() == 0) {
        throw DegeneracyError("eigenprojector_filter: empty spectrum");
    }
    Eigen::Index which = spectrum.find(alpha);
    return lagrange_poly_coeffs(spectrum.values, spectrum.values[which]);
}

Vector recovered_scores(const DistinctSpectrum& spectrum, const EigenSystem& es,
                        double alpha, const Signal& x) {
    Eigen::Index which = spectrum.find(alpha);
    PolyCoeffs w = eigenprojector_filter(spectrum, alpha);
    SymMatrix c{es.eigenvectors * es.eigenvalues.asDiagonal() *
                es.eigenvectors.transpose()};
    Signal filtered = matrix_poly_apply(c, w, x);
    const auto& group = spectrum.groups[static_cast<std::size_t>(which)];
    Vector scores(static_cast<Eigen::Index>(group.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
        scores[static_cast<Eigen::Index>(i)] = es.eigenvectors.col(group[i]).dot(filtered);
    }
    return scores;
}

FpcaResult fpca_scores(const SignalBatch& batch, Eigen::Index num_scores) {
    if (num_scores < 1 || num_scores > batch.m()) {
        throw InvalidInputError("fpca_scores: need 1 <= num_scores <= m");
    }
    if (batch.n() < 2) {
        throw SampleSizeError("fpca_scores: need n >= 2");
    }
    Vector mean = batch.columns.rowwise().mean();
    Matrix centered = batch.columns.colwise() - mean;
    CovMatrix cov = empirical_cov_matrix(batch);
    EigenSystem es = sym_eigendecomp(cov.inner, /*psd_clamp=*/true);

    double lambda_max = es.eigenvalues[0];
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
        if (es.eigenvalues[k] > 1e-10 * std::max(lambda_max, 0.0) &&
            es.eigenvalues[k] > 0.0) {
            ++rank;
        }
    }

    FpcaResult out;
    out.rank = rank;
    out.rank_warning = num_scores > rank;
    out.scores = Matrix::Zero(num_scores, batch.n());
    out.eigenvalues = es.eigenvalues.head(num_scores).cwiseMax(0.0);
    Eigen::Index usable = std::min(num_scores, rank);
    if (usable > 0) {
        out.scores.topRows(usable) =
            es.eigenvectors.leftCols(usable).transpose() * centered;
    }
    return out;
}

}  // namespace hvn
