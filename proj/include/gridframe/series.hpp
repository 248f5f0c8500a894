#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace gridframe {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPiOverThree = 2.0 * std::numbers::pi / 3.0;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kSqrt3 = std::numbers::sqrt3;

/// Instantaneous phase voltages (va, vb, vc).
using PhaseTriple = std::array<double, 3>;

/// A run of samples tagged with the absolute index of the first one.
template <typename T>
struct Series {
    std::int64_t start_index = 0;
    std::vector<T> samples;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    std::int64_t index_of(std::size_t i) const noexcept {
        return start_index + static_cast<std::int64_t>(i);
    }
    const T& operator[](std::size_t i) const { return samples[i]; }
    T& operator[](std::size_t i) { return samples[i]; }
};

using SampleSeries = Series<PhaseTriple>;
using ComplexSeries = Series<cplx>;
using RealSeries = Series<double>;

/// e^{j x}
inline cplx unit_phasor(double x) { return std::polar(1.0, x); }

}  // namespace gridframe
