#pragma once

#include "tomoprop/states.hpp"

#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace tomoprop {

// Quadrature grid X in [-x_max, x_max] (n_x points including both ends) and
// angles theta_j = (j + 1/2) pi / n_theta, which never hit sin(theta) = 0.
class TomogramGrid {
public:
    TomogramGrid(double x_max, std::size_t n_x, std::size_t n_theta);

    double x_max() const { return x_max_; }
    std::size_t n_x() const { return n_x_; }
    std::size_t n_theta() const { return n_theta_; }
    double dx() const { return dx_; }
    double dtheta() const;
    double x(std::size_t i) const { return -x_max_ + dx_ * static_cast<double>(i); }
    double theta(std::size_t j) const;
    Axis x_axis() const { return {-x_max_, dx_, n_x_}; }
    double x_weight(std::size_t i) const { return (i == 0 || i + 1 == n_x_) ? 0.5 * dx_ : dx_; }

    bool operator==(const TomogramGrid& o) const {
        return x_max_ == o.x_max_ && n_x_ == o.n_x_ && n_theta_ == o.n_theta_;
    }

private:
    double x_max_;
    std::size_t n_x_;
    std::size_t n_theta_;
    double dx_;
};

inline constexpr double kDefaultXMax = 8.0;
inline constexpr std::size_t kDefaultNx = 1024;
inline constexpr std::size_t kDefaultNtheta = 180;

// Reduces theta to [0, pi) using w(X, theta + pi) = w(-X, theta); returns (theta', X').
std::pair<double, double> fold_angle(double theta, double x);

enum class Interpolation { bilinear, cubic };

struct TomogramInvariants {
    double min_value = 0.0;
    double max_row_mass_defect = 0.0;  // max_j |int w dX - 1|
    bool ok(double negativity_tol = 1e-6) const {
        return min_value >= -negativity_tol && max_row_mass_defect <= 1e-3;
    }
};

// w(X, theta) stored row-major: values[j * n_x + i] = w(x_i, theta_j).
struct Tomogram {
    TomogramGrid grid;
    std::vector<double> values;

    explicit Tomogram(TomogramGrid g) : grid(g), values(g.n_x() * g.n_theta(), 0.0) {}

    double& at(std::size_t j, std::size_t i) { return values[j * grid.n_x() + i]; }
    double at(std::size_t j, std::size_t i) const { return values[j * grid.n_x() + i]; }
    std::span<const double> row(std::size_t j) const {
        return {values.data() + j * grid.n_x(), grid.n_x()};
    }
    double row_mass(std::size_t j) const;
    // Value at arbitrary (X, theta) through the twisted theta-extension; zero for |X| > x_max.
    double sample(double x, double theta, Interpolation interp = Interpolation::bilinear) const;
    TomogramInvariants invariants() const;
};

// Row-averaged L1 distance (1/n_theta) sum_j int |a - b| dX, and max-norm distance.
double tomogram_l1(const Tomogram& a, const Tomogram& b);
double tomogram_linf(const Tomogram& a, const Tomogram& b);

// W(q, p) stored row-major: values[a * p_axis.n + b] = W(q_a, p_b).
struct WignerFunction {
    Axis q_axis;
    Axis p_axis;
    std::vector<double> values;

    WignerFunction(Axis q, Axis p) : q_axis(q), p_axis(p), values(q.n * p.n, 0.0) {}
    double& at(std::size_t a, std::size_t b) { return values[a * p_axis.n + b]; }
    double at(std::size_t a, std::size_t b) const { return values[a * p_axis.n + b]; }
    // (1/2pi) int W dq dp by trapezoid.
    double total_mass() const;
    // Moments (1/2pi) int q^k p^l W.
    double moment(int kq, int kp) const;
};

struct WignerOptions {
    // Momentum half-range kept after the u-FFT; <= 0 means the coordinate grid's q_max.
    double p_max = 0.0;
};

// W on the half-step q axis of rho's grid (2n-1 points) and the FFT-conjugate
// p axis, cropped to |p| <= p_max. Requires an even number of q points.
WignerFunction wigner_from_density(const DensityMatrix& rho, WignerOptions opts = {});
// Max |Im W| seen before the real cast of the last wigner_from_density call in this thread.
double last_wigner_imag_defect();

// Inverse of wigner_from_density. W must live on a half-step q axis and an
// FFT-compatible p axis (as produced by wigner_from_density or wigner_axes_for).
DensityMatrix density_from_wigner(const WignerFunction& w);

// Axes on which density_from_wigner can run for the given coordinate grid.
std::pair<Axis, Axis> wigner_axes_for(const CoordinateGrid& grid, double p_max = 0.0);

// Evaluates the line integral (1/2pi) int W(X cos - s sin, X sin + s cos) ds
// at arbitrary (X, theta). Holds its own copy of W; cheap to copy.
class LineIntegrator {
public:
    explicit LineIntegrator(WignerFunction w);
    double operator()(double x, double theta) const;

private:
    std::shared_ptr<const WignerFunction> w_;
    std::shared_ptr<const std::vector<double>> transposed_;  // p-major copy
    std::vector<std::pair<long, long>> row_spans_;  // support of each q row
    std::vector<std::pair<long, long>> col_spans_;  // support of each p column
    std::pair<long, long> row_union_;
    std::pair<long, long> col_union_;
};

Tomogram radon(const WignerFunction& w, const TomogramGrid& tgrid);
double radon_line(const WignerFunction& w, double x, double theta);

struct FilterOptions {
    bool hann = false;  // apodize the ramp filter
};

// Filtered back-projection onto the given axes.
WignerFunction inverse_radon(const Tomogram& w, const Axis& q_axis, const Axis& p_axis,
                             FilterOptions opts = {});

enum class Route { via_wigner, direct };

Tomogram tomogram_from_density(const DensityMatrix& rho, const TomogramGrid& tgrid,
                               Route route = Route::via_wigner);

struct DensityReconstruction {
    DensityMatrix rho;
    double hermiticity_defect;  // max |rho - rho^dagger| before symmetrization
};

// Reconstructs rho on `grid`. The direct route cannot produce the diagonal and
// throws SingularityError; use density_entry_direct for off-diagonal probes.
DensityReconstruction density_from_tomogram(const Tomogram& w, const CoordinateGrid& grid,
                                            Route route = Route::via_wigner,
                                            FilterOptions opts = {});

// rho(q, q') straight from the tomogram with the delta collapsing eta = (q - q')/sin(theta).
// Requires |q - q'| > 3 * grid.spacing().
cdouble density_entry_direct(const Tomogram& w, const CoordinateGrid& grid, double q, double qp);

Tomogram tomogram_from_wavefunction(const WaveFunction& psi, const TomogramGrid& tgrid);

// <X^n>(theta_j) for every row; n in [0, 4].
std::vector<double> moments(const Tomogram& w, int n);

// M(X, mu, nu) evaluated on demand from a Wigner function through
// M(X, mu, nu) = w(X / r, atan2(nu, mu)) / r with r = hypot(mu, nu).
class SymplecticTomogram {
public:
    explicit SymplecticTomogram(LineIntegrator line) : line_(std::move(line)) {}
    double operator()(double x, double mu, double nu) const;

private:
    LineIntegrator line_;
};

SymplecticTomogram symplectic_tomogram(const WignerFunction& w);

}  // namespace tomoprop
