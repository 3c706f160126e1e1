#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace tomoprop {

using cdouble = std::complex<double>;

// Uniform sample positions min + i*step, i = 0..n-1.
struct Axis {
    double min = 0.0;
    double step = 1.0;
    std::size_t n = 0;

    double at(std::size_t i) const { return min + step * static_cast<double>(i); }
    double max() const { return at(n - 1); }
    // Fractional index of x (no bounds check).
    double index_of(double x) const { return (x - min) / step; }
};

// Symmetric coordinate grid [-q_max, q_max] with n points including both ends.
class CoordinateGrid {
public:
    CoordinateGrid(double q_max, std::size_t n);

    std::size_t size() const { return n_; }
    double q_min() const { return -q_max_; }
    double q_max() const { return q_max_; }
    double spacing() const { return spacing_; }
    double q(std::size_t i) const { return -q_max_ + spacing_ * static_cast<double>(i); }
    Axis axis() const { return {-q_max_, spacing_, n_}; }
    // Largest momentum resolved by the grid.
    double nyquist_momentum() const;
    // Trapezoid weight of node i (spacing included).
    double weight(std::size_t i) const;

    bool operator==(const CoordinateGrid& o) const { return n_ == o.n_ && q_max_ == o.q_max_; }

private:
    double q_max_;
    std::size_t n_;
    double spacing_;
};

inline constexpr double kDefaultQMax = 8.0;
inline constexpr std::size_t kDefaultNq = 512;

struct WaveFunction {
    CoordinateGrid grid;
    std::vector<cdouble> values;

    double norm() const;  // trapezoid L2 norm
    void normalize();
};

struct DensityInvariants {
    double hermiticity_defect = 0.0;  // max |rho - rho^dagger|
    double trace_defect = 0.0;        // |tr rho - 1|
    double min_diagonal = 0.0;
    double max_diagonal_imag = 0.0;
    bool ok() const;
};

// Entry (i, j) holds rho(q_i, q_j).
struct DensityMatrix {
    CoordinateGrid grid;
    Eigen::MatrixXcd values;

    cdouble trace() const;
    double purity() const;  // tr(rho^2) by double trapezoid
    DensityInvariants invariants() const;
};

// Coherent state |alpha> with <q> = sqrt2 Re alpha and <p> = sqrt2 Im alpha.
WaveFunction make_coherent(cdouble alpha, const CoordinateGrid& grid);
// Normalized (|alpha> + sign |-alpha>); sign must be +1 or -1.
WaveFunction make_cat(cdouble alpha, int sign, const CoordinateGrid& grid);

DensityMatrix density_from_wavefunction(const WaveFunction& psi);

// <q> and <p> of a normalized state; <p> uses a spectral derivative.
double mean_position(const WaveFunction& psi);
double mean_momentum(const WaveFunction& psi);
// |psi(q)|^2 mass outside the central fraction of the grid.
double edge_mass(const WaveFunction& psi, double margin);

// Half the trace norm of a - b, with trapezoid weights. Grids must match.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace tomoprop
