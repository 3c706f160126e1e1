#pragma once

#include <array>
#include <cmath>

namespace tomoprop {

// Four-point Lagrange weights for nodes {-1, 0, 1, 2} at offset t in [0, 1).
inline std::array<double, 4> lagrange4_weights(double t) {
    const double tm1 = t - 1.0;
    const double tm2 = t - 2.0;
    const double tp1 = t + 1.0;
    return {-t * tm1 * tm2 / 6.0, tp1 * tm1 * tm2 / 2.0, -tp1 * t * tm2 / 2.0, tp1 * t * tm1 / 6.0};
}

// Linear interpolation of uniformly sampled data f[0..n) at fractional index x;
// zero outside [0, n-1].
template <class Seq>
double lerp_samples(const Seq& f, std::size_t n, double x) {
    if (!(x >= 0.0) || x > static_cast<double>(n - 1)) return 0.0;
    auto i = static_cast<std::size_t>(x);
    if (i >= n - 1) return f[n - 1];
    const double t = x - static_cast<double>(i);
    return (1.0 - t) * f[i] + t * f[i + 1];
}

// Cubic Lagrange interpolation at fractional index x; samples outside [0, n) count as zero.
template <class Seq>
auto cubic_samples(const Seq& f, std::size_t n, double x) -> std::decay_t<decltype(f[0])> {
    using V = std::decay_t<decltype(f[0])>;
    const double fl = std::floor(x);
    if (fl < -2.0 || fl > static_cast<double>(n)) return V{};
    const auto i0 = static_cast<long>(fl);
    const auto w = lagrange4_weights(x - fl);
    V acc{};
    for (int k = 0; k < 4; ++k) {
        const long idx = i0 - 1 + k;
        if (idx >= 0 && idx < static_cast<long>(n)) acc += w[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(idx)];
    }
    return acc;
}

}  // namespace tomoprop
