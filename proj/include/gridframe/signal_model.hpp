#pragma once

// Synthetic three-phase voltages:
//   va = Va cos(theta_k + phi_a)
//   vb = Vb cos(theta_k + phi_b - 2pi/3)
//   vc = Vc cos(theta_k + phi_c + 2pi/3)
// with theta_k the accumulated phase, so frequency steps stay continuous.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gridframe/error.hpp"
#include "gridframe/series.hpp"

namespace gridframe {

enum class SagType { TypeC, TypeD };

struct SagSpec {
    SagType type = SagType::TypeC;
    double depth = 1.0;  // (0, 1], 1 is no sag
    std::int64_t start_index = 0;
    std::int64_t end_index = 0;  // exclusive

    void validate() const {
        if (!(depth > 0.0 && depth <= 1.0))
            throw ConfigError("sag depth must lie in (0, 1], got " + std::to_string(depth));
        if (start_index < 0) throw ConfigError("sag start_index must be non-negative");
        if (!(start_index < end_index)) throw ConfigError("sag start_index must precede end_index");
    }
};

struct FrequencyEvent {
    std::int64_t start_index = 0;
    double new_frequency_hz = 0.0;
};

struct ThreePhaseConfig {
    std::array<double, 3> amplitudes{1.0, 1.0, 1.0};
    std::array<double, 3> phases_rad{0.0, 0.0, 0.0};
    double sample_rate_hz = 1000.0;
    double base_frequency_hz = 50.0;
    std::vector<FrequencyEvent> frequency_events;
    std::vector<SagSpec> sag_events;
    double noise_variance = 0.0;

    /// Normalized angular frequency in rad/sample.
    double omega_for(double frequency_hz) const {
        return 2.0 * kPi * frequency_hz / sample_rate_hz;
    }
    double base_omega() const { return omega_for(base_frequency_hz); }

    void validate() const {
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(amplitudes[i] > 0.0) || !std::isfinite(amplitudes[i]))
                throw ConfigError("amplitude " + std::to_string(i) + " must be strictly positive");
            if (!std::isfinite(phases_rad[i])) throw ConfigError("phases must be finite");
        }
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
            throw ConfigError("sample_rate_hz must be positive");
        auto check_frequency = [&](double f) {
            if (!(f > 0.0 && f < sample_rate_hz / 2.0))
                throw ConfigError("frequency " + std::to_string(f) +
                                  " Hz gives normalized omega outside (0, pi)");
        };
        check_frequency(base_frequency_hz);
        std::int64_t last = -1;
        for (const auto& ev : frequency_events) {
            if (ev.start_index < 0) throw ConfigError("frequency event index must be non-negative");
            if (ev.start_index < last) throw ConfigError("frequency events must be sorted by start_index");
            last = ev.start_index;
            check_frequency(ev.new_frequency_hz);
        }
        for (const auto& sag : sag_events) sag.validate();
        if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
            throw ConfigError("noise_variance must be non-negative");
    }
};

/// Phase offsets applied to phases a, b, c on top of phi_i.
inline constexpr std::array<double, 3> kPhaseOffsets{0.0, -kTwoPiOverThree, kTwoPiOverThree};

/// RMS phasors and the imbalance ratios delta_i = V_i / V_a.
struct PhasorVector {
    std::array<cplx, 3> phasors;
    std::array<cplx, 3> normalized;
};

inline PhasorVector phasor_vector(const ThreePhaseConfig& config) {
    config.validate();
    PhasorVector out;
    for (std::size_t i = 0; i < 3; ++i)
        out.phasors[i] = std::polar(config.amplitudes[i] / kSqrt2, config.phases_rad[i] + kPhaseOffsets[i]);
    out.normalized[0] = cplx{1.0, 0.0};
    out.normalized[1] = out.phasors[1] / out.phasors[0];
    out.normalized[2] = out.phasors[2] / out.phasors[0];
    return out;
}

/// Amplitudes and phases active during a sag.
///
/// Type C keeps phase a and scales the imaginary parts of the b and c phasors
/// by the depth; Type D scales phase a by the depth and the real parts of b
/// and c. Phasors are taken with the 120 degree offsets included.
inline ThreePhaseConfig apply_sag(const ThreePhaseConfig& config, const SagSpec& sag) {
    sag.validate();
    if (sag.type != SagType::TypeC && sag.type != SagType::TypeD)
        throw ConfigError("unknown sag type");
    ThreePhaseConfig out = config;
    if (sag.depth == 1.0) return out;

    auto set_phase = [&](std::size_t i, cplx p) {
        out.amplitudes[i] = std::abs(p);
        out.phases_rad[i] = std::arg(p) - kPhaseOffsets[i];
    };
    for (std::size_t i = 1; i < 3; ++i) {
        const cplx p = std::polar(config.amplitudes[i], config.phases_rad[i] + kPhaseOffsets[i]);
        if (sag.type == SagType::TypeC)
            set_phase(i, {p.real(), sag.depth * p.imag()});
        else
            set_phase(i, {sag.depth * p.real(), p.imag()});
    }
    if (sag.type == SagType::TypeD) out.amplitudes[0] = sag.depth * config.amplitudes[0];
    return out;
}

namespace detail {

// Phase accumulated up to sample k given piecewise-constant frequency.
class PhaseSchedule {
public:
    explicit PhaseSchedule(const ThreePhaseConfig& config) {
        segments_.push_back({0, config.base_omega(), 0.0});
        for (const auto& ev : config.frequency_events) {
            auto& prev = segments_.back();
            const double theta = prev.theta0 + prev.omega * static_cast<double>(ev.start_index - prev.start);
            if (ev.start_index == prev.start) {
                prev.omega = config.omega_for(ev.new_frequency_hz);
            } else {
                segments_.push_back({ev.start_index, config.omega_for(ev.new_frequency_hz), theta});
            }
        }
    }

    double theta(std::int64_t k) const {
        const Segment* seg = &segments_.front();
        for (const auto& s : segments_) {
            if (s.start <= k) seg = &s;
            else break;
        }
        return seg->theta0 + seg->omega * static_cast<double>(k - seg->start);
    }

    double omega(std::int64_t k) const {
        double w = segments_.front().omega;
        for (const auto& s : segments_) {
            if (s.start <= k) w = s.omega;
            else break;
        }
        return w;
    }

private:
    struct Segment {
        std::int64_t start;
        double omega;
        double theta0;
    };
    std::vector<Segment> segments_;
};

}  // namespace detail

/// Accumulated phase theta_k for the config's frequency schedule.
inline double phase_at(const ThreePhaseConfig& config, std::int64_t k) {
    return detail::PhaseSchedule(config).theta(k);
}

/// Synthesizes samples 0..n-1. Sag events override amplitudes/phases on
/// [start, end); when several overlap the last listed wins. A non-zero
/// noise_variance adds white Gaussian noise drawn from `seed`.
inline SampleSeries synth(const ThreePhaseConfig& config, std::int64_t n, std::uint64_t seed = 0) {
    config.validate();
    if (n < 0) throw ConfigError("sample count must be non-negative");

    std::vector<ThreePhaseConfig> sagged;
    sagged.reserve(config.sag_events.size());
    for (const auto& sag : config.sag_events) sagged.push_back(apply_sag(config, sag));

    const detail::PhaseSchedule schedule(config);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(config.noise_variance));
    const bool noisy = config.noise_variance > 0.0;

    SampleSeries out;
    out.samples.resize(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        const ThreePhaseConfig* active = &config;
        for (std::size_t e = 0; e < config.sag_events.size(); ++e) {
            const auto& sag = config.sag_events[e];
            if (k >= sag.start_index && k < sag.end_index) active = &sagged[e];
        }
        const double theta = schedule.theta(k);
        auto& s = out.samples[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < 3; ++i) {
            s[i] = active->amplitudes[i] * std::cos(theta + active->phases_rad[i] + kPhaseOffsets[i]);
            if (noisy) s[i] += noise(rng);
        }
    }
    return out;
}

}  // namespace gridframe
