#pragma once

#include <functional>
#include <vector>

#include "hvn/covariance.hpp"
#include "hvn/linalg.hpp"

namespace hvn {

// Frequency response of a spectral covariance filter: h acts multiplicatively
// on the transform coefficients, h_at_zero on the kernel component.
struct SpectralResponse {
    std::function<double(double)> h;
    double h_at_zero = 0.0;
};

// Samples h at 1000 points of [0, lambda_max] and rejects non-finite values.
void validate_response(const SpectralResponse& resp, double lambda_max);

// Distinct positive eigenvalues of an eigensystem, descending, with the
// index groups that share each value. Eigenvalues at or below zero_cutoff
// belong to the kernel and are excluded.
struct DistinctSpectrum {
    Vector values;
    std::vector<std::vector<Eigen::Index>> groups;
    double zero_cutoff = 0.0;

    Eigen::Index count() const { return values.size(); }
    // Index of the stored value matching alpha (tie tolerance); throws
    // InvalidInputError when alpha is not in the spectrum.
    Eigen::Index find(double alpha) const;
};

// zero_cutoff default: 1e-10 * lambda_max.
double default_zero_cutoff(const EigenSystem& es);
DistinctSpectrum distinct_spectrum(const EigenSystem& es);
DistinctSpectrum distinct_spectrum(const EigenSystem& es, double zero_cutoff);

// Covariance Fourier transform: coefficient l is <x, phi_l>.
Vector hvft(const EigenSystem& es, const Signal& x);

// sum_l h(lambda_l) <x, phi_l> phi_l + h(0) * x_perp, where eigenvalues at or
// below zero_cutoff are routed to the kernel term.
Signal spectral_filter_apply(const EigenSystem& es, const SpectralResponse& resp,
                             const Signal& x, double zero_cutoff);
Signal spectral_filter_apply(const EigenSystem& es, const SpectralResponse& resp,
                             const Signal& x);

// Polynomial filter in the covariance matrix applied to a signal or batch.
Signal spatial_filter_apply(const CovMatrix& c, const PolyCoeffs& w, const Signal& x);
Matrix spatial_filter_apply(const CovMatrix& c, const PolyCoeffs& w, const Matrix& x);

// Orthogonal projector onto the eigenspace of the distinct eigenvalue alpha.
SymMatrix eigenprojector(const EigenSystem& es, const DistinctSpectrum& spectrum,
                         double alpha);

// Polynomial filter that reproduces the alpha-eigenspace projector when
// applied through the covariance matrix: the scaled Lagrange interpolant on
// the distinct spectrum.
PolyCoeffs eigenprojector_filter(const DistinctSpectrum& spectrum, double alpha);

// Scores <h_alpha(C) x, phi_l> for l in the alpha group; equal to the raw
// scores <x, phi_l> of the unfiltered signal. The covariance matrix is
// reassembled from the eigensystem so the filter runs through the matrix
// path rather than the spectral one.
Vector recovered_scores(const DistinctSpectrum& spectrum, const EigenSystem& es,
                        double alpha, const Signal& x);

// First num_scores PCA scores of the batch columns (rows of the result).
// Rows past the covariance rank are zero-filled with rank_warning set.
// eigenvalues holds the matching top covariance eigenvalues (clamped at
// zero), which callers need to standardize the scores.
struct FpcaResult {
    Matrix scores;  // num_scores x n
    Vector eigenvalues;
    Eigen::Index rank = 0;
    bool rank_warning = false;
};

FpcaResult fpca_scores(const SignalBatch& batch, Eigen::Index num_scores);

}  // namespace hvn
