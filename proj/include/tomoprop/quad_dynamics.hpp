#pragma once

#include "tomoprop/states.hpp"
#include "tomoprop/transforms.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tomoprop {

// Scalar function of time: constant c, cosine a + b cos(freq t), or a table
// with linear interpolation (held constant outside its range is an error).
class TimeSampler {
public:
    enum class Kind { constant, cosine, table };

    static TimeSampler constant(double c);
    static TimeSampler cosine(double a, double b, double freq);
    static TimeSampler table(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;
    // Upper bound of the sampler on [t0, t1].
    double sup(double t0, double t1) const;
    // Whether the sampler is defined on all of [t0, t1].
    bool covers(double t0, double t1) const;
    Kind kind() const { return kind_; }

private:
    Kind kind_ = Kind::constant;
    double a_ = 0.0;
    double b_ = 0.0;
    double freq_ = 0.0;
    std::vector<double> times_;
    std::vector<double> values_;
};

// H = p^2/2 + omega_sq(t) q^2/2 - force(t) q, so that p' = -omega_sq q + force.
struct QuadraticHamiltonian {
    TimeSampler omega_sq = TimeSampler::constant(0.0);
    TimeSampler force = TimeSampler::constant(0.0);

    static QuadraticHamiltonian free() { return {}; }
    static QuadraticHamiltonian harmonic() { return {TimeSampler::constant(1.0), TimeSampler::constant(0.0)}; }
};

// Complex solution of eps'' + omega^2 eps = 0 with eps(t0) = 1, eps'(t0) = i,
// and beta(t) = -(i/sqrt2) int_{t0}^t eps f.
struct EpsilonTrajectory {
    QuadraticHamiltonian hamiltonian;
    std::vector<double> times;
    std::vector<cdouble> eps;
    std::vector<cdouble> eps_dot;
    std::vector<cdouble> beta;

    double start() const { return times.front(); }
    double end() const { return times.back(); }
    // max_k |eps' eps* - eps'* eps - 2i|
    double max_wronskian_defect() const;
};

// Classic RK4 with a uniform step no larger than dt that lands on t_end exactly.
EpsilonTrajectory solve_epsilon(const QuadraticHamiltonian& h, double t_end, double dt, double t_start = 0.0);

// Which sign convention builds the Delta_p component from beta.
//   from_motion_integral: Delta_p = (beta - beta*)/(i sqrt2), the p-row of (A - A^+)/(i sqrt2)
//   as_printed:           Delta_p = i (beta - beta*)/sqrt2
// Only from_motion_integral satisfies Ehrenfest's theorem; the other is kept so
// the test suite can demonstrate that.
enum class DeltaSign { from_motion_integral, as_printed };

// Linear integrals of motion I = Lambda (p, q)^T + Delta, equal to (p, q) at t0.
struct MotionIntegrals {
    Eigen::Matrix2d lambda = Eigen::Matrix2d::Identity();
    Eigen::Vector2d delta = Eigen::Vector2d::Zero();
    double t0 = 0.0;
    double t = 0.0;

    double det_defect() const { return std::abs(lambda.determinant() - 1.0); }
};

MotionIntegrals motion_integrals(const EpsilonTrajectory& traj, double t,
                                 DeltaSign sign = DeltaSign::from_motion_integral);

// Chains integrals of motion: (t2 <- t1) after (t1 <- t0).
MotionIntegrals compose(const MotionIntegrals& outer, const MotionIntegrals& inner);

struct MappedPoint {
    double x;
    double theta;  // in [0, pi)
    double weight;
};

// Delta-form optical propagator: w_t(X, theta) = weight * w_t0(X0, theta0).
class OpticalAffineMap {
public:
    explicit OpticalAffineMap(const MotionIntegrals& mi);

    MappedPoint operator()(double x, double theta) const;
    const MotionIntegrals& integrals() const { return mi_; }
    double t0() const { return mi_.t0; }
    double t() const { return mi_.t; }

private:
    MotionIntegrals mi_;
    Eigen::Matrix2d inverse_;  // Lambda^{-1}
    Eigen::Vector2d offset_;   // Lambda^{-1} Delta
};

OpticalAffineMap optical_map(const MotionIntegrals& mi);
OpticalAffineMap compose(const OpticalAffineMap& outer, const OpticalAffineMap& inner);

// Evolved tomogram at an arbitrary (X, theta), zero where the pull-back leaves the grid.
double evolved_value(const Tomogram& w0, const OpticalAffineMap& map, double x, double theta,
                     Interpolation interp = Interpolation::bilinear);

// Pull-back of w0 through the map on the twisted theta-extension.
Tomogram evolve_tomogram(const Tomogram& w0, const OpticalAffineMap& map,
                         Interpolation interp = Interpolation::bilinear);

// Convenience: solve, build and apply the map from t_start to t_end.
OpticalAffineMap map_for(const QuadraticHamiltonian& h, double t_end, double dt = 1e-3, double t_start = 0.0);

}  // namespace tomoprop
