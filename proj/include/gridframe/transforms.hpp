#pragma once

// Static three-phase transforms: Clarke (full and reduced), its complex
// form, Park, the symmetrical-component transform and the FM-demodulator
// reading of Park.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridframe/error.hpp"
#include "gridframe/series.hpp"
#include "gridframe/signal_model.hpp"

namespace gridframe {

using Mat3 = std::array<std::array<double, 3>, 3>;
using CMat3 = std::array<std::array<cplx, 3>, 3>;

struct ClarkeOutput {
    double v0 = 0.0;
    double valpha = 0.0;
    double vbeta = 0.0;
};

struct AlphaBeta {
    double valpha = 0.0;
    double vbeta = 0.0;
};

struct DirectQuadrature {
    double vd = 0.0;
    double vq = 0.0;
};

struct SequencePhasors {
    cplx zero;
    cplx positive;
    cplx negative;
};

/// Orthonormal Clarke matrix; rows are the zero, alpha and beta axes.
inline Mat3 clarke_matrix() {
    const double s = std::sqrt(2.0 / 3.0);
    const double h = std::sqrt(2.0) / 2.0;
    const double r = kSqrt3 / 2.0;
    return {{{s * h, s * h, s * h}, {s, -s / 2.0, -s / 2.0}, {0.0, s * r, -s * r}}};
}

/// Complex Clarke vector c = sqrt(2/3) (1, e^{-j2pi/3}, e^{j2pi/3}).
inline std::array<cplx, 3> clarke_vector() {
    const double s = std::sqrt(2.0 / 3.0);
    return {cplx{s, 0.0}, std::polar(s, -kTwoPiOverThree), std::polar(s, kTwoPiOverThree)};
}

inline ClarkeOutput clarke_full(const PhaseTriple& v) {
    const Mat3 m = clarke_matrix();
    auto row = [&](std::size_t r) { return m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2]; };
    return {row(0), row(1), row(2)};
}

inline AlphaBeta clarke_reduced(const PhaseTriple& v) {
    const ClarkeOutput c = clarke_full(v);
    return {c.valpha, c.vbeta};
}

/// s_k = c^H s_k = v_alpha + j v_beta. Evaluated through the Clarke rows so
/// that it matches a Clarke table read back from CSV bit for bit.
inline cplx clarke_complex(const PhaseTriple& v) {
    const AlphaBeta ab = clarke_reduced(v);
    return {ab.valpha, ab.vbeta};
}

template <typename Out, typename F>
Series<Out> map_series(const SampleSeries& s, F&& f) {
    Series<Out> out;
    out.start_index = s.start_index;
    out.samples.reserve(s.size());
    for (const auto& v : s.samples) out.samples.push_back(f(v));
    return out;
}

inline Series<ClarkeOutput> clarke_full(const SampleSeries& s) {
    return map_series<ClarkeOutput>(s, [](const PhaseTriple& v) { return clarke_full(v); });
}

inline Series<AlphaBeta> clarke_reduced(const SampleSeries& s) {
    return map_series<AlphaBeta>(s, [](const PhaseTriple& v) { return clarke_reduced(v); });
}

inline ComplexSeries clarke_complex(const SampleSeries& s) {
    return map_series<cplx>(s, [](const PhaseTriple& v) { return clarke_complex(v); });
}

/// Clockwise rotation [[cos, sin], [-sin, cos]].
inline DirectQuadrature park(const AlphaBeta& ab, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * ab.valpha + s * ab.vbeta, -s * ab.valpha + c * ab.vbeta};
}

inline Series<DirectQuadrature> park(const Series<AlphaBeta>& ab, std::span<const double> theta) {
    if (ab.size() != theta.size())
        throw DimensionError("park: " + std::to_string(ab.size()) + " samples but " +
                             std::to_string(theta.size()) + " angles");
    Series<DirectQuadrature> out;
    out.start_index = ab.start_index;
    out.samples.reserve(ab.size());
    for (std::size_t i = 0; i < ab.size(); ++i) out.samples.push_back(park(ab[i], theta[i]));
    return out;
}

/// theta_k = omega0 * k over the absolute sample indices of `like`.
template <typename T>
std::vector<double> nominal_angles(const Series<T>& like, double omega0) {
    std::vector<double> theta(like.size());
    for (std::size_t i = 0; i < like.size(); ++i) theta[i] = omega0 * static_cast<double>(like.index_of(i));
    return theta;
}

/// Complex Park output v_k = e^{-j theta_k} s_k.
inline ComplexSeries park_complex(const ComplexSeries& s, std::span<const double> theta) {
    if (s.size() != theta.size()) throw DimensionError("park_complex: length mismatch");
    ComplexSeries out{s.start_index, {}};
    out.samples.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out.samples.push_back(unit_phasor(-theta[i]) * s[i]);
    return out;
}

/// Unitary symmetrical-component matrix (1/sqrt3)[[1,1,1],[1,a^2,a],[1,a,a^2]],
/// a = e^{-j2pi/3}. Rows give zero, positive and negative sequence. The
/// positive row is (1, a^2, a) because (1, a, a^2) annihilates a balanced
/// abc phasor set (1, a, a^2).
inline CMat3 symmetrical_matrix() {
    const double k = 1.0 / kSqrt3;
    const cplx one{k, 0.0};
    const cplx a = std::polar(k, -kTwoPiOverThree);
    const cplx a2 = std::polar(k, kTwoPiOverThree);
    return {{{one, one, one}, {one, a2, a}, {one, a, a2}}};
}

inline SequencePhasors symmetrical(const std::array<cplx, 3>& phasors) {
    const CMat3 u = symmetrical_matrix();
    auto row = [&](std::size_t r) { return u[r][0] * phasors[0] + u[r][1] * phasors[1] + u[r][2] * phasors[2]; };
    return {row(0), row(1), row(2)};
}

inline SequencePhasors symmetrical(const PhasorVector& v) { return symmetrical(v.phasors); }

/// Sequence phasors in waveform scale, so that
///   c^H s_k = (V+ e^{jwk} + conj(V-) e^{-jwk}) / sqrt2.
inline SequencePhasors sequence_from_waveform(const ThreePhaseConfig& config) {
    config.validate();
    const auto& amp = config.amplitudes;
    const auto& ph = config.phases_rad;
    const cplx pos = (std::polar(amp[0], ph[0]) + std::polar(amp[1], ph[1]) + std::polar(amp[2], ph[2])) / kSqrt3;
    const cplx neg_conj = (std::polar(amp[0], -ph[0]) + std::polar(amp[1], -(ph[1] + kTwoPiOverThree)) +
                           std::polar(amp[2], -(ph[2] - kTwoPiOverThree))) /
                          kSqrt3;
    const cplx zero = (std::polar(amp[0], ph[0]) + std::polar(amp[1], ph[1] - kTwoPiOverThree) +
                       std::polar(amp[2], ph[2] + kTwoPiOverThree)) /
                      kSqrt3;
    return {zero, pos, std::conj(neg_conj)};
}

/// Phasors estimated from sampled waveforms by projecting each phase onto
/// e^{-j omega0 k}: V_i = (sqrt2 / N) sum_k v_i,k e^{-j omega0 k}. Exact for
/// steady signals spanning whole periods.
inline PhasorVector estimate_phasors(const SampleSeries& s, double omega0) {
    if (s.empty()) throw DimensionError("estimate_phasors: empty series");
    PhasorVector out{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const cplx w = unit_phasor(-omega0 * static_cast<double>(s.index_of(i)));
        for (std::size_t p = 0; p < 3; ++p) out.phasors[p] += s[i][p] * w;
    }
    for (auto& p : out.phasors) p *= kSqrt2 / static_cast<double>(s.size());
    out.normalized[0] = cplx{1.0, 0.0};
    for (std::size_t p = 1; p < 3; ++p)
        out.normalized[p] = out.phasors[0] == cplx{} ? cplx{} : out.phasors[p] / out.phasors[0];
    return out;
}

/// Default demodulator window: one nominal period, round(2pi / omega0).
inline std::size_t default_lpf_window(double omega0) {
    const auto w = static_cast<std::size_t>(std::lround(2.0 * kPi / omega0));
    return w == 0 ? 1 : w;
}

/// Fixed-frequency FM demodulator:
///   y_k = x_k e^{-j omega0 k},  u_k = moving average of y over `lpf_window`,
///   dw_k = angle(u_k conj(u_{k-1})).
/// Output starts at the first sample with a full window and a predecessor,
/// so it holds x.size() - lpf_window values.
inline RealSeries fm_demodulate(const ComplexSeries& x, double omega0, std::size_t lpf_window) {
    if (lpf_window < 1) throw ConfigError("fm_demodulate: lpf_window must be at least 1");
    if (lpf_window > x.size())
        throw DimensionError("fm_demodulate: window " + std::to_string(lpf_window) + " exceeds series length " +
                             std::to_string(x.size()));
    std::vector<cplx> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = x[i] * unit_phasor(-omega0 * static_cast<double>(x.index_of(i)));

    // Window sums recomputed directly; windows are short and this avoids drift.
    auto average = [&](std::size_t end) {
        cplx acc{0.0, 0.0};
        for (std::size_t i = end + 1 - lpf_window; i <= end; ++i) acc += y[i];
        return acc / static_cast<double>(lpf_window);
    };

    RealSeries out;
    out.start_index = x.start_index + static_cast<std::int64_t>(lpf_window);
    out.samples.reserve(x.size() - lpf_window);
    cplx prev = average(lpf_window - 1);
    for (std::size_t i = lpf_window; i < x.size(); ++i) {
        const cplx u = average(i);
        out.samples.push_back(std::arg(u * std::conj(prev)));
        prev = u;
    }
    return out;
}

}  // namespace gridframe
