#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "gridframe/subspace.hpp"
#include "test_util.hpp"

using namespace gridframe;
using gridframe::testing::balanced_config;

namespace {

Covariance3 balanced_expected() {
    Covariance3 c;
    c.entries = {{{0.5, -0.25, -0.25}, {-0.25, 0.5, -0.25}, {-0.25, -0.25, 0.5}}};
    return c;
}

void expect_matrix_near(const Mat3& a, const Mat3& b, double tol) {
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(a[r][c], b[r][c], tol) << "(" << r << "," << c << ")";
}

Covariance3 random_psd(std::mt19937_64& rng, int rank = 3) {
    std::normal_distribution<double> n(0.0, 1.0);
    Covariance3 c;
    for (int i = 0; i < rank; ++i) {
        const Vec3 v{n(rng), n(rng), n(rng)};
        c.entries = linalg::add(c.entries, linalg::outer(v, v));
    }
    return c;
}

double energy(const SampleSeries& s) {
    double e = 0.0;
    for (const auto& v : s.samples) e += linalg::dot(v, v);
    return e;
}

}  // namespace

TEST(EmpiricalCovariance, BalancedWholePeriods) {
    expect_matrix_near(empirical_covariance(synth(balanced_config(), 1000)).entries, balanced_expected().entries, 1e-6);
}

TEST(EmpiricalCovariance, SingleSample) {
    const SampleSeries s{0, {{1.0, -2.0, 3.0}}};
    expect_matrix_near(empirical_covariance(s).entries, linalg::outer(s[0], s[0]), 0.0);
}

TEST(EmpiricalCovariance, EmptyRejected) { EXPECT_THROW(empirical_covariance(SampleSeries{}), DimensionError); }

TEST(EmpiricalCovariance, ConvergesToAnalytic) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        ThreePhaseConfig c = gridframe::testing::random_config(rng);
        c.amplitudes[0] = 1.0;
        const double w = c.base_omega();
        const PhasorVector pv = phasor_vector(c);
        const Covariance3 limit = analytic_covariance(pv.normalized[1], pv.normalized[2]);
        for (double periods : {100.0, 200.0}) {
            const auto n = static_cast<std::int64_t>(periods * c.sample_rate_hz / c.base_frequency_hz) + 7;
            const Covariance3 r = empirical_covariance(synth(c, n));
            // Leftover of the double-frequency term: |sum e^{2jwk}| <= 1 / |sin w|.
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) {
                    const double bound =
                        0.5 * c.amplitudes[i] * c.amplitudes[j] / (static_cast<double>(n) * std::abs(std::sin(w)));
                    EXPECT_LE(std::abs(r(i, j) - limit(i, j)), bound + 1e-12);
                    if (periods == 200.0) {
                        EXPECT_LT(std::abs(r(i, j) - limit(i, j)), 1e-3);
                    }
                }
        }
    }
}

TEST(EmpiricalCovariance, ExactOverWholePeriods) {
    ThreePhaseConfig c = balanced_config();
    c.amplitudes = {1.3, 0.7, 1.1};
    c.phases_rad = {0.2, -0.4, 0.1};
    expect_matrix_near(empirical_covariance(synth(c, 2000)).entries, analytic_covariance(c).entries, 1e-10);
}

TEST(AnalyticCovariance, Examples) {
    expect_matrix_near(analytic_covariance(std::polar(1.0, -2.0 * kPi / 3.0), std::polar(1.0, 2.0 * kPi / 3.0)).entries,
                       balanced_expected().entries, 1e-15);
    expect_matrix_near(analytic_covariance(0.0, 0.0).entries, {{{0.5, 0, 0}, {0, 0, 0}, {0, 0, 0}}}, 0.0);
    const Covariance3 c = analytic_covariance(std::polar(0.9, -2.0 * kPi / 3.0), std::polar(1.0, 2.0 * kPi / 3.0));
    EXPECT_NEAR(c(0, 1), -0.225, 1e-15);
    EXPECT_EQ(c(0, 1), c(1, 0));
}

TEST(Eigen3, BalancedCovariance) {
    // R = (vr vr^T + vi vi^T) / 2 with orthogonal vr, vi and |vr|^2 = |vi|^2 = 3/2.
    const EigenDecomposition e = eigen3(balanced_expected());
    EXPECT_NEAR(e.eigenvalues[0], 0.75, 1e-14);
    EXPECT_NEAR(e.eigenvalues[1], 0.75, 1e-14);
    EXPECT_NEAR(e.eigenvalues[2], 0.0, 1e-14);
    for (double x : e.eigenvectors[2]) EXPECT_NEAR(x, 1.0 / std::sqrt(3.0), 1e-14);
}

TEST(Eigen3, IdentityAndDiagonal) {
    Covariance3 id;
    id.entries = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    const EigenDecomposition e = eigen3(id);
    for (double l : e.eigenvalues) EXPECT_EQ(l, 1.0);

    Covariance3 d;
    d.entries = {{{2, 0, 0}, {0, 1, 0}, {0, 0, 3}}};
    const EigenDecomposition f = eigen3(d);
    EXPECT_EQ(f.eigenvalues, (Vec3{3, 2, 1}));
    EXPECT_EQ(f.eigenvectors[0], (Vec3{0, 0, 1}));
    EXPECT_EQ(f.eigenvectors[1], (Vec3{1, 0, 0}));
    EXPECT_EQ(f.eigenvectors[2], (Vec3{0, 1, 0}));
}

TEST(Eigen3, RejectsNonSymmetric) {
    Covariance3 c;
    c.entries = {{{1, 2, 0}, {0, 1, 0}, {0, 0, 1}}};
    EXPECT_THROW(eigen3(c), DimensionError);
}

TEST(Eigen3, MatchesReferenceSolverAndReconstructs) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const Covariance3 c = random_psd(rng, 1 + trial % 3);
        const EigenDecomposition e = eigen3(c);

        Eigen::Matrix3d m;
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k) m(r, k) = c.entries[r][k];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ref(m);
        Eigen::Vector3d ref_vals = ref.eigenvalues().reverse();
        const double scale = std::max(1.0, ref_vals(0));
        for (int i = 0; i < 3; ++i) ASSERT_NEAR(e.eigenvalues[i], ref_vals(i), 1e-12 * scale);

        // Ordering, orthonormality, Q Lambda Q^T = R, R q = lambda q.
        ASSERT_GE(e.eigenvalues[0], e.eigenvalues[1]);
        ASSERT_GE(e.eigenvalues[1], e.eigenvalues[2]);
        Mat3 rebuilt{};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j)
                ASSERT_NEAR(linalg::dot(e.eigenvectors[i], e.eigenvectors[j]), i == j ? 1.0 : 0.0, 1e-10);
            Mat3 term = linalg::outer(e.eigenvectors[i], e.eigenvectors[i]);
            for (auto& row : term)
                for (double& x : row) x *= e.eigenvalues[i];
            rebuilt = linalg::add(rebuilt, term);
        }
        ASSERT_LT(linalg::frobenius_distance(rebuilt, c.entries) / linalg::frobenius(c.entries), 1e-9);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t r = 0; r < 3; ++r) {
                const double rq = linalg::dot(c.entries[r], e.eigenvectors[i]);
                ASSERT_NEAR(rq, e.eigenvalues[i] * e.eigenvectors[i][r], 1e-9 * scale);
            }
            // first non-negligible component positive
            const auto it = std::find_if(e.eigenvectors[i].begin(), e.eigenvectors[i].end(),
                                         [](double x) { return std::abs(x) > 1e-12; });
            ASSERT_GT(*it, 0.0);
        }
    }
}

TEST(ClarkePca, BalancedSubspaceIsClarkePlane) {
    const EigenDecomposition e = eigen3(balanced_expected());
    EXPECT_LT(linalg::frobenius_distance(principal_projector(e, 2), clarke_projector()), 1e-10);
}

TEST(ClarkePca, ThirdEigenvalueVanishesForAnyImbalance) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> mag(0.1, 2.0), ang(-kPi, kPi);
    for (int i = 0; i < 200; ++i) {
        const EigenDecomposition e =
            eigen3(analytic_covariance(std::polar(mag(rng), ang(rng)), std::polar(mag(rng), ang(rng))));
        ASSERT_LT(std::abs(e.eigenvalues[2]), 1e-9 * e.eigenvalues[0]);
    }
}

TEST(PcaReduce, BalancedRankTwoKeepsEnergy) {
    const SampleSeries s = synth(balanced_config(), 1000);
    const PcaReduction p = pca_reduce(s, 2);
    double e2 = 0.0;
    for (const auto& u : p.components.samples) e2 += u[0] * u[0] + u[1] * u[1];
    EXPECT_NEAR(e2 / energy(s), 1.0, 1e-6);
}

TEST(PcaReduce, FullRankIsOrthogonal) {
    std::mt19937_64 rng(29);
    const SampleSeries s = synth(gridframe::testing::random_config(rng), 777);
    const PcaReduction p = pca_reduce(s, 3);
    double e3 = 0.0;
    for (const auto& u : p.components.samples) e3 += u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    EXPECT_NEAR(e3, energy(s), 1e-10 * energy(s));
}

TEST(PcaReduce, OutputCovarianceIsDiagonal) {
    std::mt19937_64 rng(31);
    const SampleSeries s = synth(gridframe::testing::random_config(rng), 5000);
    const PcaReduction p = pca_reduce(s, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            double acc = 0.0;
            for (const auto& u : p.components.samples) acc += u[i] * u[j];
            EXPECT_NEAR(acc / 5000.0, 0.0, 1e-6);
        }
}

TEST(PcaReduce, BalancedMatchesClarkeUpToSignAndOrder) {
    const SampleSeries s = synth(balanced_config(), 1000);
    const PcaReduction p = pca_reduce(s, 2);
    const auto ab = clarke_reduced(s);
    // The 0.375 eigenspace is degenerate, so compare the plane: each PCA
    // component must be a unit-norm combination of alpha and beta.
    for (std::size_t i = 0; i < 2; ++i) {
        const Vec3& q = p.basis.eigenvectors[i];
        const Mat3 m = clarke_matrix();
        const double ca = linalg::dot(q, m[1]), cb = linalg::dot(q, m[2]);
        EXPECT_NEAR(ca * ca + cb * cb, 1.0, 1e-10);
        for (std::size_t k = 0; k < s.size(); ++k)
            ASSERT_NEAR(p.components[k][i], ca * ab[k].valpha + cb * ab[k].vbeta, 1e-10);
    }
    // And when the solver returns the Clarke axes themselves, they match
    // component-wise up to sign.
    const EigenDecomposition e = eigen3(balanced_expected());
    const Mat3 m = clarke_matrix();
    for (std::size_t i = 0; i < 2; ++i) {
        const double c1 = std::abs(linalg::dot(e.eigenvectors[i], m[1]));
        const double c2 = std::abs(linalg::dot(e.eigenvectors[i], m[2]));
        EXPECT_NEAR(c1 * c1 + c2 * c2, 1.0, 1e-12);
    }
}

TEST(PcaReduce, RankOutOfRange) {
    const SampleSeries s = synth(balanced_config(), 10);
    EXPECT_THROW(pca_reduce(s, 0), ConfigError);
    EXPECT_THROW(pca_reduce(s, 4), ConfigError);
}

TEST(RankEstimate, Examples) {
    EXPECT_EQ(rank_estimate(balanced_expected(), 1e-9), 2u);
    Covariance3 id;
    id.entries = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    EXPECT_EQ(rank_estimate(id, 1e-9), 3u);
    EXPECT_THROW(rank_estimate(id, 0.0), ConfigError);
    for (SagType t : {SagType::TypeC, SagType::TypeD})
        for (double d : {0.2, 0.5, 0.8}) {
            const ThreePhaseConfig c = apply_sag(balanced_config(), {t, d, 0, 1});
            EXPECT_EQ(rank_estimate(empirical_covariance(synth(c, 2000)), 1e-6), 2u);
        }
}
