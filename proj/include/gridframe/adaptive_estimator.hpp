#pragma once

// Widely linear AR(1) tracking of the complex Clarke voltage,
//   s_k = conj(h) s_{k-1} + conj(g) conj(s_{k-1}),
// with ACLMS weight updates, frequency / unbalance-factor extraction from
// (h, g), and the self-balancing Clarke and Park transforms built on them.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridframe/error.hpp"
#include "gridframe/series.hpp"
#include "gridframe/transforms.hpp"

namespace gridframe {

struct WlarState {
    cplx h{0.0, 0.0};
    cplx g{0.0, 0.0};
    double mu = 0.01;
    std::optional<cplx> prev_sample;
    std::int64_t sample_index = 0;  // index of the next sample to be consumed
};

struct AclmsStep {
    WlarState state;
    cplx error{0.0, 0.0};
};

/// One ACLMS update. The first sample only primes the regressor and returns
/// a zero error.
inline AclmsStep aclms_step(const WlarState& state, cplx s_k) {
    if (!(state.mu > 0.0)) throw ConfigError("aclms_step: mu must be positive");
    AclmsStep out{state, {0.0, 0.0}};
    if (state.prev_sample) {
        const cplx x = *state.prev_sample;
        const cplx e = s_k - (std::conj(state.h) * x + std::conj(state.g) * std::conj(x));
        out.error = e;
        out.state.h += state.mu * x * std::conj(e);
        out.state.g += state.mu * std::conj(x) * std::conj(e);
        auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        if (!finite(out.state.h) || !finite(out.state.g))
            throw DivergenceError(state.sample_index, "non-finite ACLMS weights");
    }
    out.state.prev_sample = s_k;
    out.state.sample_index = state.sample_index + 1;
    return out;
}

struct FrequencyEstimate {
    double omega = 0.0;  // rad/sample, in [0, pi]
    bool low_confidence = false;
};

struct Vuf {
    cplx kappa{0.0, 0.0};
    bool low_confidence = false;

    /// |kappa| < 1 means the positive sequence dominates.
    bool physical() const { return std::abs(kappa) < 1.0; }
};

/// Below this |g| the weights are treated as balanced and kappa = 0.
inline constexpr double kBalancedWeightThreshold = 1e-8;

namespace detail {

struct Discriminant {
    double root = 0.0;  // sqrt(max(Im^2 h - |g|^2, 0))
    bool clamped = false;
};

inline Discriminant wlar_discriminant(cplx h, cplx g) {
    const double a = std::abs(h.imag());
    const double b = std::abs(g);
    // Factored to avoid cancellation when |Im h| ~ |g|.
    const double d = (a - b) * (a + b);
    if (d < 0.0 || !std::isfinite(d)) return {0.0, true};
    return {std::sqrt(d), false};
}

}  // namespace detail

/// e^{jw} = Re h + j sqrt(Im^2 h - |g|^2). A negative discriminant is clamped
/// to zero and flagged.
inline FrequencyEstimate extract_frequency(cplx h, cplx g) {
    const auto d = detail::wlar_discriminant(h, g);
    return {std::atan2(d.root, h.real()), d.clamped};
}

/// kappa = V-/V+ = (j / conj(g)) (Im h + sqrt(Im^2 h - |g|^2)).
inline Vuf extract_vuf(cplx h, cplx g) {
    const auto d = detail::wlar_discriminant(h, g);
    if (std::abs(g) < kBalancedWeightThreshold) return {{0.0, 0.0}, d.clamped};
    const cplx kappa = cplx{0.0, 1.0} / std::conj(g) * (h.imag() + d.root);
    return {kappa, d.clamped};
}

/// WLAR weights that exactly model a two-sequence signal with frequency
/// omega and unbalance factor kappa (|kappa| != 1).
inline std::pair<cplx, cplx> wlar_weights(double omega, cplx kappa) {
    const double k2 = std::norm(kappa);
    if (k2 == 1.0) throw ImbalanceOverflowError("wlar_weights: |kappa| = 1 has no WLAR representation");
    const double s = std::sin(omega);
    const cplx j{0.0, 1.0};
    const cplx g = 2.0 * j * s * kappa / (1.0 - k2);
    const cplx h = unit_phasor(-omega) - 2.0 * j * s * k2 / (1.0 - k2);
    return {h, g};
}

/// m_k = sqrt2 (s_k - conj(kappa) conj(s_k)) / (1 - |kappa|^2).
inline cplx adaptive_clarke(cplx s_k, cplx kappa) {
    const double k2 = std::norm(kappa);
    if (!(k2 < 1.0))
        throw ImbalanceOverflowError("adaptive_clarke: |kappa| = " + std::to_string(std::sqrt(k2)) +
                                     " >= 1, negative sequence dominates");
    return kSqrt2 * (s_k - std::conj(kappa) * std::conj(s_k)) / (1.0 - k2);
}

/// e^{-j theta_k} m_k with theta_k the running sum of estimated frequencies.
/// The accumulator starts at omega_0 * k_0 so that a constant estimate gives
/// theta_k = omega * k.
inline ComplexSeries adaptive_park(const ComplexSeries& mbar, std::span<const double> omega) {
    if (mbar.size() != omega.size()) throw DimensionError("adaptive_park: length mismatch");
    ComplexSeries out{mbar.start_index, {}};
    out.samples.reserve(mbar.size());
    double theta = 0.0;
    for (std::size_t i = 0; i < mbar.size(); ++i) {
        theta = (i == 0) ? omega[0] * static_cast<double>(mbar.start_index) : theta + omega[i];
        out.samples.push_back(unit_phasor(-theta) * mbar[i]);
    }
    return out;
}

struct EstimatorOptions {
    double mu = 0.01;
    cplx h0{0.0, 0.0};
    cplx g0{0.0, 0.0};
    double sample_rate_hz = 1000.0;

    void validate() const {
        if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be positive, got " + std::to_string(mu));
        if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be positive");
    }
};

struct TraceRecord {
    std::int64_t k = 0;
    cplx h;
    cplx g;
    double omega = 0.0;  // rad/sample
    double frequency_hz = 0.0;
    cplx kappa;
    cplx mbar;      // adaptive Clarke output
    cplx mtilde;    // adaptive Park output
    double theta = 0.0;
    cplx error;
    bool low_confidence = false;
};

struct EstimatorTrace {
    std::vector<TraceRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
    const TraceRecord& back() const { return records.back(); }
};

/// Streaming form of the pipeline; one push per complex Clarke sample.
class AdaptiveTransform {
public:
    explicit AdaptiveTransform(const EstimatorOptions& options, std::int64_t start_index = 0)
        : options_(options) {
        options_.validate();
        state_.h = options.h0;
        state_.g = options.g0;
        state_.mu = options.mu;
        state_.sample_index = start_index;
    }

    TraceRecord push(cplx s_k) {
        const std::int64_t k = state_.sample_index;
        const AclmsStep step = aclms_step(state_, s_k);
        state_ = step.state;

        const FrequencyEstimate f = extract_frequency(state_.h, state_.g);
        Vuf vuf = extract_vuf(state_.h, state_.g);
        bool low = f.low_confidence || vuf.low_confidence;
        cplx kappa = vuf.kappa;
        if (!vuf.physical()) {
            // Transient estimate with |kappa| >= 1: pass the sample through unbalanced.
            kappa = cplx{0.0, 0.0};
            low = true;
        }

        theta_ = started_ ? theta_ + f.omega : f.omega * static_cast<double>(k);
        started_ = true;

        TraceRecord r;
        r.k = k;
        r.h = state_.h;
        r.g = state_.g;
        r.omega = f.omega;
        r.frequency_hz = f.omega * options_.sample_rate_hz / (2.0 * kPi);
        r.kappa = vuf.kappa;
        r.mbar = adaptive_clarke(s_k, kappa);
        r.theta = theta_;
        r.mtilde = unit_phasor(-theta_) * r.mbar;
        r.error = step.error;
        r.low_confidence = low;
        return r;
    }

    const WlarState& state() const noexcept { return state_; }

private:
    EstimatorOptions options_;
    WlarState state_;
    double theta_ = 0.0;
    bool started_ = false;
};

/// Adaptive Clarke/Park over a complex Clarke series.
inline EstimatorTrace run_pipeline(const ComplexSeries& s, const EstimatorOptions& options) {
    AdaptiveTransform tracker(options, s.start_index);
    EstimatorTrace trace;
    trace.records.reserve(s.size());
    for (const cplx& x : s.samples) trace.records.push_back(tracker.push(x));
    return trace;
}

/// Adaptive Clarke/Park over raw phase voltages.
inline EstimatorTrace run_pipeline(const SampleSeries& s, const EstimatorOptions& options) {
    return run_pipeline(clarke_complex(s), options);
}

}  // namespace gridframe
