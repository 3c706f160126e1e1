#pragma once

#include "tomoprop/states.hpp"
#include "tomoprop/transforms.hpp"

#include <cmath>
#include <numbers>

namespace fixtures {

using namespace tomoprop;

inline constexpr double kPi = std::numbers::pi;

inline const CoordinateGrid& coord() {
    static const CoordinateGrid g(kDefaultQMax, kDefaultNq);
    return g;
}

inline const TomogramGrid& tgrid() {
    static const TomogramGrid g(kDefaultXMax, kDefaultNx, kDefaultNtheta);
    return g;
}

// Coarser tomogram grid for tests whose tolerance does not depend on resolution.
inline const TomogramGrid& small_tgrid() {
    static const TomogramGrid g(kDefaultXMax, 256, 48);
    return g;
}

inline const WaveFunction& vacuum() {
    static const WaveFunction psi = make_coherent(0.0, coord());
    return psi;
}

inline const WaveFunction& coherent1() {
    static const WaveFunction psi = make_coherent(1.0, coord());
    return psi;
}

inline const WaveFunction& coherent_c() {
    static const WaveFunction psi = make_coherent({1.0, 0.5}, coord());
    return psi;
}

inline const WaveFunction& cat2() {
    static const WaveFunction psi = make_cat(2.0, 1, coord());
    return psi;
}

inline const DensityMatrix& rho_vacuum() {
    static const DensityMatrix r = density_from_wavefunction(vacuum());
    return r;
}

inline const DensityMatrix& rho_coherent1() {
    static const DensityMatrix r = density_from_wavefunction(coherent1());
    return r;
}

inline const DensityMatrix& rho_cat2() {
    static const DensityMatrix r = density_from_wavefunction(cat2());
    return r;
}

inline const Tomogram& w_vacuum() {
    static const Tomogram w = tomogram_from_wavefunction(vacuum(), tgrid());
    return w;
}

inline const Tomogram& w_coherent1() {
    static const Tomogram w = tomogram_from_wavefunction(coherent1(), tgrid());
    return w;
}

inline double vacuum_row(double x) { return std::exp(-x * x) / std::sqrt(kPi); }

// Tomogram of a centred Gaussian spread by r: (r sqrt(pi))^-1 exp(-X^2 / r^2).
inline double scaled_vacuum(double x, double r) { return std::exp(-x * x / (r * r)) / (r * std::sqrt(kPi)); }

}  // namespace fixtures
