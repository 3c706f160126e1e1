#pragma once

#include "tomoprop/quad_dynamics.hpp"
#include "tomoprop/transforms.hpp"

namespace tomoprop {

// Point on a characteristic of the tomogram evolution equation. theta lives on
// the real line; it is folded only when w0 is sampled.
struct CharacteristicState {
    double x = 0.0;
    double theta = 0.0;
    double amp = 1.0;
};

struct CharacteristicRate {
    double dx;
    double dtheta;
    double dlog_amp;
};

CharacteristicRate characteristic_rhs(const CharacteristicState& s, double t, const QuadraticHamiltonian& h);

// Semi-Lagrangian solve: every final-time node is traced back to t = 0 with
// RK4 and w0 is sampled there with bilinear interpolation.
Tomogram evolve_semilagrangian(const Tomogram& w0, const QuadraticHamiltonian& h, double t_end, double dt);

// Largest time step evolve_semilagrangian accepts for h on [0, t_end].
double max_semilagrangian_step(const QuadraticHamiltonian& h, double t_end);

}  // namespace tomoprop
