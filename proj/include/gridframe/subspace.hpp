#pragma once

// Covariance of three-phase samples, a 3x3 symmetric eigensolver and PCA
// reduction. Used to show that the principal axes of a balanced system are
// the Clarke axes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <numeric>
#include <string>
#include <vector>

#include "gridframe/error.hpp"
#include "gridframe/series.hpp"
#include "gridframe/signal_model.hpp"
#include "gridframe/transforms.hpp"

namespace gridframe {

using Vec3 = std::array<double, 3>;

struct Covariance3 {
    Mat3 entries{};

    double operator()(std::size_t r, std::size_t c) const { return entries[r][c]; }
};

/// Eigenvalues in descending order; eigenvectors[i] pairs with eigenvalues[i].
struct EigenDecomposition {
    Vec3 eigenvalues{};
    std::array<Vec3, 3> eigenvectors{};
};

namespace linalg {

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 m{};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) m[r][c] = a[r] * b[c];
    return m;
}

inline Mat3 add(const Mat3& a, const Mat3& b) {
    Mat3 m{};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) m[r][c] = a[r][c] + b[r][c];
    return m;
}

inline double frobenius(const Mat3& m) {
    double acc = 0.0;
    for (const auto& row : m)
        for (double v : row) acc += v * v;
    return std::sqrt(acc);
}

inline double frobenius_distance(const Mat3& a, const Mat3& b) {
    double acc = 0.0;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) acc += (a[r][c] - b[r][c]) * (a[r][c] - b[r][c]);
    return std::sqrt(acc);
}

}  // namespace linalg

/// (1/N) sum s_k s_k^T, no mean removal.
inline Covariance3 empirical_covariance(const SampleSeries& s) {
    if (s.empty()) throw DimensionError("empirical_covariance: empty series");
    Covariance3 cov;
    for (const auto& v : s.samples)
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c) cov.entries[r][c] += v[r] * v[c];
    const double n = static_cast<double>(s.size());
    for (auto& row : cov.entries)
        for (double& x : row) x /= n;
    return cov;
}

/// Limit covariance for unit phase-a amplitude and imbalance ratios delta_b, delta_c.
inline Covariance3 analytic_covariance(cplx delta_b, cplx delta_c) {
    const double mb = std::abs(delta_b);
    const double mc = std::abs(delta_c);
    const double ab = std::arg(delta_b);
    const double ac = std::arg(delta_c);
    Covariance3 cov;
    auto& e = cov.entries;
    e[0][0] = 0.5;
    e[0][1] = e[1][0] = 0.5 * mb * std::cos(ab);
    e[0][2] = e[2][0] = 0.5 * mc * std::cos(ac);
    e[1][1] = 0.5 * mb * mb;
    e[1][2] = e[2][1] = 0.5 * mb * mc * std::cos(ab - ac);
    e[2][2] = 0.5 * mc * mc;
    return cov;
}

/// Analytic covariance of a steady config (sags and frequency events ignored).
inline Covariance3 analytic_covariance(const ThreePhaseConfig& config) {
    const PhasorVector pv = phasor_vector(config);
    Covariance3 cov = analytic_covariance(pv.normalized[1], pv.normalized[2]);
    const double scale = config.amplitudes[0] * config.amplitudes[0];
    for (auto& row : cov.entries)
        for (double& x : row) x *= scale;
    return cov;
}

namespace detail {

inline double off_diagonal_norm(const Mat3& a) {
    return std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]));
}

inline void apply_sign_convention(Vec3& v) {
    double largest = 0.0;
    for (double x : v) largest = std::max(largest, std::abs(x));
    const double tol = 1e-12 * largest;
    for (double x : v) {
        if (std::abs(x) > tol) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for a symmetric 3x3 matrix.
///
/// Sweeps until the off-diagonal Frobenius norm drops below 1e-14 times the
/// matrix norm (max 50 sweeps). Eigenvectors are Gram-Schmidt cleaned in
/// descending eigenvalue order and the first non-negligible component of
/// each is made positive.
inline EigenDecomposition eigen3(const Covariance3& r) {
    Mat3 a = r.entries;
    const double scale = std::max(1.0, linalg::frobenius(a));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            if (std::abs(a[i][j] - a[j][i]) > 1e-12 * scale)
                throw DimensionError("eigen3: matrix is not symmetric at (" + std::to_string(i) + "," +
                                     std::to_string(j) + ")");

    Mat3 v{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    const double target = 1e-14 * linalg::frobenius(a);
    constexpr int kMaxSweeps = 50;
    for (int sweep = 0; sweep < kMaxSweeps && detail::off_diagonal_norm(a) > target; ++sweep) {
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t q = p + 1; q < 3; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- J^T A J with J the (p,q) rotation.
                for (std::size_t k = 0; k < 3; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < 3; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = a[q][p] = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });

    EigenDecomposition out;
    for (std::size_t i = 0; i < 3; ++i) {
        out.eigenvalues[i] = a[order[i]][order[i]];
        for (std::size_t k = 0; k < 3; ++k) out.eigenvectors[i][k] = v[k][order[i]];
    }
    for (std::size_t i = 0; i < 3; ++i) {
        Vec3& q = out.eigenvectors[i];
        for (std::size_t j = 0; j < i; ++j) {
            const double d = linalg::dot(q, out.eigenvectors[j]);
            for (std::size_t k = 0; k < 3; ++k) q[k] -= d * out.eigenvectors[j][k];
        }
        const double n = linalg::norm(q);
        for (double& x : q) x /= n;
        detail::apply_sign_convention(q);
    }
    return out;
}

/// Number of eigenvalues above tol * lambda_max.
inline std::size_t rank_estimate(const Covariance3& r, double tol) {
    if (!(tol > 0.0)) throw ConfigError("rank_estimate: tolerance must be positive");
    const EigenDecomposition e = eigen3(r);
    const double lmax = e.eigenvalues[0];
    if (lmax <= 0.0) return 0;
    return static_cast<std::size_t>(
        std::count_if(e.eigenvalues.begin(), e.eigenvalues.end(), [&](double l) { return l > tol * lmax; }));
}

/// Orthogonal projector sum_i q_i q_i^T onto the span of orthonormal vectors.
inline Mat3 projector(std::span<const Vec3> basis) {
    Mat3 p{};
    for (const auto& q : basis) p = linalg::add(p, linalg::outer(q, q));
    return p;
}

/// Projector onto the top-r eigenvectors.
inline Mat3 principal_projector(const EigenDecomposition& e, std::size_t r) {
    if (r < 1 || r > 3) throw ConfigError("principal_projector: r must be in [1, 3]");
    return projector(std::span<const Vec3>(e.eigenvectors.data(), r));
}

/// Projector onto the alpha/beta rows of the Clarke matrix.
inline Mat3 clarke_projector() {
    const Mat3 m = clarke_matrix();
    const std::array<Vec3, 2> rows{m[1], m[2]};
    return projector(rows);
}

struct PcaReduction {
    EigenDecomposition basis;
    std::size_t rank = 0;
    Series<std::vector<double>> components;
};

/// u_k = Q_{1:r}^T x_k with Q from the empirical covariance of x.
inline PcaReduction pca_reduce(const SampleSeries& x, std::size_t r) {
    if (r < 1 || r > 3) throw ConfigError("pca_reduce: r must be in [1, 3], got " + std::to_string(r));
    PcaReduction out;
    out.basis = eigen3(empirical_covariance(x));
    out.rank = r;
    out.components.start_index = x.start_index;
    out.components.samples.reserve(x.size());
    for (const auto& v : x.samples) {
        std::vector<double> u(r);
        for (std::size_t i = 0; i < r; ++i) u[i] = linalg::dot(out.basis.eigenvectors[i], v);
        out.components.samples.push_back(std::move(u));
    }
    return out;
}

}  // namespace gridframe
