#pragma once

#include "tomoprop/quad_dynamics.hpp"
#include "tomoprop/states.hpp"
#include "tomoprop/transforms.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace tomoprop {

enum class KernelKind { free, oscillator };

std::string to_string(KernelKind k);
QuadraticHamiltonian hamiltonian_for(KernelKind k);

// Schroedinger Green function G(q, q~, t); the density-matrix kernel is G G*.
class GreenKernel {
public:
    GreenKernel(KernelKind kind, double t) : kind_(kind), t_(t) {}

    KernelKind kind() const { return kind_; }
    double t() const { return t_; }
    cdouble operator()(double q, double q_src) const;
    // Discretized propagator (G(q_i, q_j) dq).
    Eigen::MatrixXcd matrix(const CoordinateGrid& grid) const;

private:
    KernelKind kind_;
    double t_;
};

// Throws CausticError at |sin t| <= 1e-6 (oscillator) or |t| <= 1e-9 (free).
GreenKernel green_kernel(KernelKind kind, double t);

WaveFunction evolve_wavefunction(const WaveFunction& psi, const GreenKernel& g);
DensityMatrix evolve_density(const DensityMatrix& rho0, const GreenKernel& g);

// Operator-norm defect of the discretized kernel on a subspace spanned by
// coherent states centred at {-2, 0, 2}^2: || (UV)^+ UV - V^+ V ||.
double unitarity_defect(const GreenKernel& g, const CoordinateGrid& grid);

struct PipelineRecord {
    KernelKind kind;
    double t;
    double trace_distance;
    double linf;
};

// Kernel-evolved rho against tomogram -> optical map -> reconstruction.
// t = 0 compares against rho0 itself.
PipelineRecord pipeline_discrepancy(const DensityMatrix& rho0, KernelKind kind, double t,
                                    const TomogramGrid& tgrid = TomogramGrid(kDefaultXMax, kDefaultNx, kDefaultNtheta));

struct ClassicalTrajectory {
    std::vector<double> times;
    std::vector<double> q;
    std::vector<double> p;
};

// RK4 for q' = p, p' = -omega^2 q + f, landing exactly on t_end.
ClassicalTrajectory classical_trajectory(const QuadraticHamiltonian& h, double q0, double p0, double t_end,
                                         double dt = 1e-3);

// Mean and covariance of a Gaussian state carried by the linear flow; the
// covariance obeys S' = A S + S A^T with A = [[0, 1], [-omega^2, 0]] on (q, p).
struct GaussianMoments {
    double q = 0.0;
    double p = 0.0;
    double var_q = 0.5;
    double var_p = 0.5;
    double cov_qp = 0.0;
};

GaussianMoments evolve_gaussian_moments(const QuadraticHamiltonian& h, GaussianMoments m0, double t_end,
                                        double dt = 1e-3);

// Exact tomogram of the Gaussian state with the given moments, sampled on tgrid.
Tomogram gaussian_tomogram(const GaussianMoments& m, const TomogramGrid& tgrid);

}  // namespace tomoprop
