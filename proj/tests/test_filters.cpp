#include <doctest.h>

#include <cmath>

#include "hvn/filters.hpp"
#include "hvn/rng.hpp"

using hvn::CovMatrix;
using hvn::DistinctSpectrum;
using hvn::EigenSystem;
using hvn::Matrix;
using hvn::PolyCoeffs;
using hvn::Signal;
using hvn::SignalBatch;
using hvn::SpectralResponse;
using hvn::SymMatrix;
using hvn::Vector;

namespace {

Matrix random_matrix(hvn::Rng& rng, Eigen::Index r, Eigen::Index c) {
    Matrix a(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) a(i, j) = rng.normal();
    return a;
}

CovMatrix random_cov(hvn::Rng& rng, Eigen::Index m, Eigen::Index n) {
    return hvn::empirical_cov_matrix(SignalBatch{random_matrix(rng, m, n)});
}

Signal random_signal(hvn::Rng& rng, Eigen::Index m) {
    Signal s(m);
    for (Eigen::Index i = 0; i < m; ++i) s[i] = rng.normal();
    return s;
}

}  // namespace

TEST_SUITE("filters") {

TEST_CASE("hvft of an eigenvector is a basis vector") {
    hvn::Rng rng(101);
    CovMatrix c = random_cov(rng, 6, 12);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    Vector coeffs = hvn::hvft(es, es.eigenvectors.col(0));
    CHECK(coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(coeffs.tail(5).cwiseAbs().maxCoeff() <= 1e-10);

    Vector zero_coeffs = hvn::hvft(es, Signal::Zero(6));
    CHECK(zero_coeffs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hvft satisfies Parseval on a full-rank eigensystem") {
    hvn::Rng rng(102);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::Index m = 3 + static_cast<Eigen::Index>(rng.uniform_int(10));
        Matrix a = random_matrix(rng, m, m);
        EigenSystem es = hvn::sym_eigendecomp(SymMatrix{a * a.transpose()});
        Signal x = random_signal(rng, m);
        double transformed = hvn::hvft(es, x).squaredNorm();
        double direct = x.squaredNorm();
        CHECK(std::abs(transformed - direct) <= 1e-10 * std::max(1.0, direct));
    }
}

TEST_CASE("all-pass spectral filter returns the input") {
    hvn::Rng rng(103);
    CovMatrix c = random_cov(rng, 8, 5);  // rank-deficient: kernel path matters
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    Signal x = random_signal(rng, 8);
    SpectralResponse all_pass{[](double) { return 1.0; }, 1.0};
    Signal y = hvn::spectral_filter_apply(es, all_pass, x);
    CHECK((y - x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("h(lambda)=lambda reproduces the covariance action") {
    hvn::Rng rng(104);
    CovMatrix c = random_cov(rng, 7, 20);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    Signal x = random_signal(rng, 7);
    SpectralResponse resp{[](double lambda) { return lambda; }, 0.0};
    Signal y = hvn::spectral_filter_apply(es, resp, x);
    Signal want = c.inner.entries() * x;
    CHECK((y - want).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, want.norm()));
}

TEST_CASE("ideal selector of the top eigenvalue is a rank-1 projection") {
    hvn::Rng rng(105);
    CovMatrix c = random_cov(rng, 6, 20);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    double top = es.eigenvalues[0];
    double tol = hvn::eigen_tie_tolerance(top);
    SpectralResponse selector{
        [top, tol](double lambda) { return std::abs(lambda - top) <= tol ? 1.0 : 0.0; },
        0.0};
    Signal x = random_signal(rng, 6);
    Signal y = hvn::spectral_filter_apply(es, selector, x);
    Vector phi = es.eigenvectors.col(0);
    Signal want = phi * phi.dot(x);
    CHECK((y - want).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("unbounded responses are rejected") {
    hvn::Rng rng(106);
    CovMatrix c = random_cov(rng, 4, 8);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    SpectralResponse bad{[](double lambda) { return 1.0 / lambda; }, 0.0};
    Signal x = random_signal(rng, 4);
    CHECK_THROWS_AS(hvn::spectral_filter_apply(es, bad, x), hvn::InvalidInputError);
}

TEST_CASE("spatial filter basics") {
    hvn::Rng rng(107);
    CovMatrix c = random_cov(rng, 5, 9);
    Signal x = random_signal(rng, 5);

    Signal same = hvn::spatial_filter_apply(c, PolyCoeffs{Vector::Ones(1)}, x);
    CHECK((same - x).cwiseAbs().maxCoeff() == 0.0);

    Vector w2 = Vector::Zero(3);
    w2[2] = 1.0;
    Signal squared = hvn::spatial_filter_apply(c, PolyCoeffs{w2}, x);
    Signal want = c.inner.entries() * (c.inner.entries() * x);
    CHECK((squared - want).cwiseAbs().maxCoeff() <= 1e-11 * std::max(1.0, want.norm()));
}

TEST_CASE("spatial and spectral paths agree") {
    hvn::Rng rng(108);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::Index m = 3 + static_cast<Eigen::Index>(rng.uniform_int(10));
        CovMatrix c = hvn::normalize_cov(random_cov(rng, m, m + 4));
        EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
        Eigen::Index deg = static_cast<Eigen::Index>(rng.uniform_int(4));
        Vector w = random_matrix(rng, deg + 1, 1).col(0);
        Signal x = random_signal(rng, m);

        Signal spatial = hvn::spatial_filter_apply(c, PolyCoeffs{w}, x);
        PolyCoeffs poly{w};
        SpectralResponse resp{[&poly](double lambda) { return poly.evaluate(lambda); },
                              poly.evaluate(0.0)};
        Signal spectral = hvn::spectral_filter_apply(es, resp, x);
        CHECK((spatial - spectral).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("pointwise filtering in the transform domain") {
    // transform of the output equals h(lambda) times transform of the input
    hvn::Rng rng(109);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::Index m = 3 + static_cast<Eigen::Index>(rng.uniform_int(10));
        CovMatrix c = hvn::normalize_cov(random_cov(rng, m, m + 4));
        EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
        Eigen::Index deg = static_cast<Eigen::Index>(rng.uniform_int(4));
        PolyCoeffs w{random_matrix(rng, deg + 1, 1).col(0)};
        Signal x = random_signal(rng, m);

        Vector in_hat = hvn::hvft(es, x);
        Vector out_hat = hvn::hvft(es, hvn::spatial_filter_apply(c, w, x));
        for (Eigen::Index l = 0; l < m; ++l) {
            double want = w.evaluate(es.eigenvalues[l]) * in_hat[l];
            CHECK(std::abs(out_hat[l] - want) <= 1e-9);
        }
    }
}

TEST_CASE("eigenprojector of a simple eigenvalue is rank one") {
    hvn::Rng rng(110);
    CovMatrix c = random_cov(rng, 5, 20);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    DistinctSpectrum spectrum = hvn::distinct_spectrum(es);
    SymMatrix p = hvn::eigenprojector(es, spectrum, spectrum.values[0]);
    Vector phi = es.eigenvectors.col(0);
    CHECK((p.entries() - phi * phi.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    // idempotent, trace = multiplicity
    CHECK((p.entries() * p.entries() - p.entries()).norm() <= 1e-10);
    CHECK(p.entries().trace() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigenprojectors resolve the identity") {
    hvn::Rng rng(111);
    CovMatrix c = random_cov(rng, 6, 4);  // rank 3: kernel projector is nontrivial
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    DistinctSpectrum spectrum = hvn::distinct_spectrum(es);
    Matrix sum = Matrix::Zero(6, 6);
    for (Eigen::Index i = 0; i < spectrum.count(); ++i) {
        sum += hvn::eigenprojector(es, spectrum, spectrum.values[i]).entries();
    }
    // kernel projector from the eigenvectors at or below the cutoff
    for (Eigen::Index l = 0; l < es.dim(); ++l) {
        if (es.eigenvalues[l] <= spectrum.zero_cutoff) {
            sum += es.eigenvectors.col(l) * es.eigenvectors.col(l).transpose();
        }
    }
    CHECK((sum - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("eigenprojector acts as identity on its eigenspace") {
    hvn::Rng rng(112);
    CovMatrix c = random_cov(rng, 6, 20);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    DistinctSpectrum spectrum = hvn::distinct_spectrum(es);
    SymMatrix p = hvn::eigenprojector(es, spectrum, spectrum.values[1]);
    for (Eigen::Index l = 0; l < es.dim(); ++l) {
        Vector mapped = p.entries() * es.eigenvectors.col(l);
        if (l == 1) {
            CHECK((mapped - es.eigenvectors.col(l)).cwiseAbs().maxCoeff() <= 1e-10);
        } else {
            CHECK(mapped.cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
    CHECK_THROWS_AS(hvn::eigenprojector(es, spectrum, -1.0), hvn::InvalidInputError);
}

TEST_CASE("projector filter on the spectrum {2,1}") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    CovMatrix c{SymMatrix{d}, 2};
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    DistinctSpectrum spectrum = hvn::distinct_spectrum(es);
    PolyCoeffs w = hvn::eigenprojector_filter(spectrum, 2.0);
    REQUIRE(w.coeffs.size() == 3);
    CHECK(w.coeffs[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w.coeffs[1] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(w.coeffs[2] == doctest::Approx(0.5).epsilon(1e-14));

    Matrix filter_matrix = hvn::spatial_filter_apply(c, w, Matrix(Matrix::Identity(2, 2)));
    Matrix p2 = hvn::eigenprojector(es, spectrum, 2.0).entries();
    CHECK((filter_matrix - p2).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("projector filters reproduce every eigenprojector") {
    // m - n >= 3: spectra flirting with the zero cutoff make the monomial
    // projector filters intrinsically ill-conditioned, independent of the
    // evaluation scheme.
    hvn::Rng rng(113);
    for (int rep = 0; rep < 25; ++rep) {
        Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_int(7));
        Eigen::Index m = n + 3 + static_cast<Eigen::Index>(rng.uniform_int(12 - n - 2));
        CovMatrix c = random_cov(rng, m, n);
        EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
        DistinctSpectrum spectrum = hvn::distinct_spectrum(es);
        for (Eigen::Index i = 0; i < spectrum.count(); ++i) {
            PolyCoeffs w = hvn::eigenprojector_filter(spectrum, spectrum.values[i]);
            CHECK(w.degree() <= spectrum.count());
            Matrix via_filter =
                hvn::spatial_filter_apply(c, w, Matrix(Matrix::Identity(m, m)));
            Matrix via_projector =
                hvn::eigenprojector(es, spectrum, spectrum.values[i]).entries();
            CHECK((via_filter - via_projector).norm() <= 1e-7);
        }
    }
}

TEST_CASE("projector filter handles a repeated eigenvalue") {
    hvn::Rng rng(114);
    // orthogonal basis from a random symmetric matrix
    Matrix a = random_matrix(rng, 4, 4);
    EigenSystem basis = hvn::sym_eigendecomp(SymMatrix{a + a.transpose()});
    Vector lambdas(4);
    lambdas << 2.0, 2.0, 0.5, 0.0;
    Matrix cme = basis.eigenvectors * lambdas.asDiagonal() *
                 basis.eigenvectors.transpose();
    CovMatrix c{SymMatrix{0.5 * (cme + cme.transpose())}, 3};
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    DistinctSpectrum spectrum = hvn::distinct_spectrum(es);
    REQUIRE(spectrum.count() == 2);
    CHECK(spectrum.groups[0].size() == 2);

    PolyCoeffs w = hvn::eigenprojector_filter(spectrum, spectrum.values[0]);
    Matrix via_filter = hvn::spatial_filter_apply(c, w, Matrix(Matrix::Identity(4, 4)));
    Matrix via_projector =
        hvn::eigenprojector(es, spectrum, spectrum.values[0]).entries();
    CHECK((via_filter - via_projector).norm() <= 1e-8);
    CHECK(via_projector.trace() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("filtering preserves the recovered scores") {
    hvn::Rng rng(115);
    CovMatrix c = random_cov(rng, 7, 9);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    DistinctSpectrum spectrum = hvn::distinct_spectrum(es);
    double alpha = spectrum.values[1];

    // an eigenvector of the alpha group scores exactly one
    Eigen::Index l = spectrum.groups[1][0];
    Vector s = hvn::recovered_scores(spectrum, es, alpha, es.eigenvectors.col(l));
    CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-9));

    // a signal orthogonal to the alpha eigenspace scores zero
    Vector other = es.eigenvectors.col(spectrum.groups[0][0]);
    Vector s0 = hvn::recovered_scores(spectrum, es, alpha, other);
    CHECK(s0.cwiseAbs().maxCoeff() <= 1e-8);

    // random signals: filtered scores equal raw scores
    for (int rep = 0; rep < 10; ++rep) {
        Signal x = random_signal(rng, 7);
        Vector filtered = hvn::recovered_scores(spectrum, es, alpha, x);
        CHECK(std::abs(filtered[0] - es.eigenvectors.col(l).dot(x)) <= 1e-8);
    }
}

TEST_CASE("fpca scores of a line batch have one active row") {
    hvn::Rng rng(116);
    Vector direction = random_signal(rng, 6).normalized();
    Matrix cols(6, 10);
    for (Eigen::Index i = 0; i < 10; ++i) {
        cols.col(i) = direction * (rng.normal() * 2.0);
    }
    auto res = hvn::fpca_scores(SignalBatch{cols}, 4);
    CHECK(res.rank == 1);
    CHECK(res.rank_warning);
    CHECK(res.scores.row(0).cwiseAbs().maxCoeff() > 0.1);
    CHECK(res.scores.bottomRows(3).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("full fpca preserves pairwise distances of centered samples") {
    hvn::Rng rng(117);
    const Eigen::Index m = 5, n = 12;
    Matrix cols = random_matrix(rng, m, n);
    auto res = hvn::fpca_scores(SignalBatch{cols}, m);
    Vector mean = cols.rowwise().mean();
    Matrix centered = cols.colwise() - mean;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double data_dist = (centered.col(i) - centered.col(j)).norm();
            double score_dist = (res.scores.col(i) - res.scores.col(j)).norm();
            CHECK(std::abs(data_dist - score_dist) <= 1e-10 * std::max(1.0, data_dist));
        }
    }
}

TEST_CASE("fpca scores of duplicated columns are all zero") {
    Vector x(4);
    x << 1.0, 2.0, 3.0, 4.0;
    Matrix cols(4, 3);
    cols << x, x, x;
    auto res = hvn::fpca_scores(SignalBatch{cols}, 2);
    CHECK(res.scores.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(res.rank == 0);
    CHECK(res.rank_warning);
}

TEST_CASE("fpca scores equal the per-column transform of a centered batch") {
    hvn::Rng rng(118);
    const Eigen::Index m = 8, n = 14, top = 5;
    Matrix cols = random_matrix(rng, m, n);
    Vector mean = cols.rowwise().mean();
    Matrix centered = cols.colwise() - mean;

    SignalBatch batch{centered};
    auto res = hvn::fpca_scores(batch, top);
    CovMatrix c = hvn::empirical_cov_matrix(batch);
    EigenSystem es = hvn::sym_eigendecomp(c.inner, true);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector coeffs = hvn::hvft(es, centered.col(i));
        CHECK((res.scores.col(i) - coeffs.head(top)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

}  // TEST_SUITE
