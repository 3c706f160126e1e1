#include "tomoprop/states.hpp"

#include "tomoprop/errors.hpp"
#include "tomoprop/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tomoprop {

namespace {
constexpr double kSupportMargin = 4.0;

void check_support(cdouble alpha, const CoordinateGrid& grid) {
    const double center = std::abs(std::numbers::sqrt2 * alpha.real());
    if (center + kSupportMargin >= grid.q_max()) {
        throw SupportError("Gaussian center " + std::to_string(center) +
                           " is within 4 units of the grid edge " + std::to_string(grid.q_max()));
    }
    const double momentum = std::abs(std::numbers::sqrt2 * alpha.imag());
    if (momentum + kSupportMargin >= grid.nyquist_momentum()) {
        throw SupportError("momentum support exceeds the grid Nyquist momentum " +
                           std::to_string(grid.nyquist_momentum()));
    }
}

std::vector<cdouble> coherent_values(cdouble alpha, const CoordinateGrid& grid) {
    const double q0 = std::numbers::sqrt2 * alpha.real();
    const double p0 = std::numbers::sqrt2 * alpha.imag();
    const double pref = std::pow(std::numbers::pi, -0.25);
    std::vector<cdouble> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = grid.q(i);
        const double phase = p0 * q - alpha.real() * alpha.imag();
        v[i] = pref * std::exp(-0.5 * (q - q0) * (q - q0)) * std::polar(1.0, phase);
    }
    return v;
}
}  // namespace

CoordinateGrid::CoordinateGrid(double q_max, std::size_t n) : q_max_(q_max), n_(n) {
    if (n < 8) throw GridError("coordinate grid needs at least 8 points");
    if (!(q_max > 0.0) || !std::isfinite(q_max)) throw GridError("q_max must be positive and finite");
    spacing_ = 2.0 * q_max / static_cast<double>(n - 1);
}

double CoordinateGrid::nyquist_momentum() const { return std::numbers::pi / spacing_; }

double CoordinateGrid::weight(std::size_t i) const {
    return (i == 0 || i + 1 == n_) ? 0.5 * spacing_ : spacing_;
}

double WaveFunction::norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += grid.weight(i) * std::norm(values[i]);
    return std::sqrt(s);
}

void WaveFunction::normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw DegenerateError("cannot normalize a null state");
    for (auto& v : values) v /= n;
}

bool DensityInvariants::ok() const {
    return hermiticity_defect <= 1e-10 && trace_defect <= 1e-6 && min_diagonal >= -1e-12;
}

cdouble DensityMatrix::trace() const {
    cdouble s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * values(i, i);
    return s;
}

double DensityMatrix::purity() const {
    const std::size_t n = grid.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            s += grid.weight(i) * grid.weight(j) * (values(i, j) * values(j, i)).real();
        }
    }
    return s;
}

DensityInvariants DensityMatrix::invariants() const {
    DensityInvariants inv;
    const std::size_t n = grid.size();
    inv.min_diagonal = values(0, 0).real();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            inv.hermiticity_defect =
                std::max(inv.hermiticity_defect, std::abs(values(i, j) - std::conj(values(j, i))));
        }
        inv.min_diagonal = std::min(inv.min_diagonal, values(i, i).real());
        inv.max_diagonal_imag = std::max(inv.max_diagonal_imag, std::abs(values(i, i).imag()));
    }
    inv.trace_defect = std::abs(trace() - 1.0);
    return inv;
}

WaveFunction make_coherent(cdouble alpha, const CoordinateGrid& grid) {
    check_support(alpha, grid);
    WaveFunction psi{grid, coherent_values(alpha, grid)};
    psi.normalize();
    return psi;
}

WaveFunction make_cat(cdouble alpha, int sign, const CoordinateGrid& grid) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("cat sign must be +1 or -1");
    if (alpha == 0.0 && sign == -1) throw DegenerateError("odd cat state with alpha = 0 is null");
    check_support(alpha, grid);
    auto plus = coherent_values(alpha, grid);
    const auto minus = coherent_values(-alpha, grid);
    for (std::size_t i = 0; i < plus.size(); ++i) plus[i] += static_cast<double>(sign) * minus[i];
    WaveFunction psi{grid, std::move(plus)};
    psi.normalize();
    return psi;
}

DensityMatrix density_from_wavefunction(const WaveFunction& psi) {
    const Eigen::Map<const Eigen::VectorXcd> v(psi.values.data(),
                                               static_cast<Eigen::Index>(psi.values.size()));
    return {psi.grid, v * v.adjoint()};
}

double mean_position(const WaveFunction& psi) {
    double s = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        s += psi.grid.weight(i) * psi.grid.q(i) * std::norm(psi.values[i]);
    }
    return s;
}

double mean_momentum(const WaveFunction& psi) {
    // Derivative by FFT on the periodized grid; the state must vanish at the edges.
    const std::size_t n = psi.values.size();
    Fft fft(n);
    auto buf = fft.buffer();
    for (std::size_t i = 0; i < n; ++i) buf[i] = psi.values[i];
    fft.forward();
    const double length = psi.grid.spacing() * static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<double>(k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n));
        const double p = 2.0 * std::numbers::pi * kk / length;
        buf[k] *= p / static_cast<double>(n);  // -i d/dq  ->  multiply by p
    }
    if (n % 2 == 0) buf[n / 2] = 0.0;
    fft.backward();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += psi.grid.weight(i) * (std::conj(psi.values[i]) * buf[i]).real();
    return s;
}

double edge_mass(const WaveFunction& psi, double margin) {
    double s = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        if (std::abs(psi.grid.q(i)) > psi.grid.q_max() - margin) s += psi.grid.weight(i) * std::norm(psi.values[i]);
    }
    return s;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (!(a.grid == b.grid)) throw GridError("trace_distance: grid mismatch");
    const std::size_t n = a.grid.size();
    Eigen::MatrixXcd d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d(i, j) = std::sqrt(a.grid.weight(i) * a.grid.weight(j)) * (a.values(i, j) - b.values(i, j));
        }
    }
    const Eigen::MatrixXcd h = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace tomoprop
