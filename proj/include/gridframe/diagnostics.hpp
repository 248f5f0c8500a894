#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "gridframe/adaptive_estimator.hpp"
#include "gridframe/error.hpp"
#include "gridframe/series.hpp"

namespace gridframe {

/// Second-order moments of a complex signal and the ellipse they describe.
struct CircularityReport {
    double covariance = 0.0;  // E|s|^2
    cplx pseudo_covariance;   // E[s^2]
    double coefficient = 0.0; // |E[s^2]| / E|s|^2, 0 for circular, 1 for real-valued
    double ellipse_major = 0.0;
    double ellipse_minor = 0.0;
};

inline CircularityReport circularity(const ComplexSeries& s) {
    if (s.size() < 2) throw DimensionError("circularity: need at least two samples");
    double cov = 0.0;
    cplx pseudo{0.0, 0.0};
    for (const cplx& x : s.samples) {
        cov += std::norm(x);
        pseudo += x * x;
    }
    const double n = static_cast<double>(s.size());
    cov /= n;
    pseudo /= n;
    if (!(cov > 0.0)) throw DimensionError("circularity: signal has zero power");

    CircularityReport r;
    r.covariance = cov;
    r.pseudo_covariance = pseudo;
    r.coefficient = std::abs(pseudo) / cov;
    // Semi-axes |A| + |B| and ||A| - |B|| of A e^{jwk} + B e^{-jwk}.
    r.ellipse_major = std::sqrt(cov + std::abs(pseudo));
    r.ellipse_minor = std::sqrt(std::max(cov - std::abs(pseudo), 0.0));
    return r;
}

enum class BalanceState { Balanced, Unbalanced };

inline const char* to_string(BalanceState s) { return s == BalanceState::Balanced ? "Balanced" : "Unbalanced"; }

struct BalanceVerdict {
    BalanceState state = BalanceState::Balanced;
    double vuf_magnitude = 0.0;
    std::string notes;
};

inline constexpr double kDefaultBalanceThreshold = 0.02;

/// Balanced iff |kappa| <= threshold.
inline BalanceVerdict classify(const Vuf& vuf, double threshold = kDefaultBalanceThreshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("classify: threshold must be in (0, 1)");
    BalanceVerdict v;
    v.vuf_magnitude = std::abs(vuf.kappa);
    v.state = v.vuf_magnitude <= threshold ? BalanceState::Balanced : BalanceState::Unbalanced;
    if (!vuf.physical()) v.notes = "|kappa| >= 1: negative sequence dominates";
    else if (vuf.low_confidence) v.notes = "estimate taken in a transient (clamped discriminant)";
    return v;
}

}  // namespace gridframe
