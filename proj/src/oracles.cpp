#include "tomoprop/oracles.hpp"

#include "tomoprop/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace tomoprop {

namespace {

constexpr double kPi = std::numbers::pi;
const cdouble kI{0.0, 1.0};

// Diagonal mass in the outer 5% of the grid.
double boundary_mass(const DensityMatrix& rho) {
    const auto& g = rho.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.q(i)) > 0.95 * g.q_max()) s += g.weight(i) * std::abs(rho.values(i, i).real());
    }
    return s;
}

void check_boundary(const DensityMatrix& rho, const char* what) {
    const double m = boundary_mass(rho);
    if (m > 1e-6) {
        throw SupportError(std::string(what) + " carries mass " + std::to_string(m) + " near the grid boundary");
    }
}

}  // namespace

std::string to_string(KernelKind k) { return k == KernelKind::free ? "free" : "oscillator"; }

QuadraticHamiltonian hamiltonian_for(KernelKind k) {
    return k == KernelKind::free ? QuadraticHamiltonian::free() : QuadraticHamiltonian::harmonic();
}

cdouble GreenKernel::operator()(double q, double q_src) const {
    if (kind_ == KernelKind::free) {
        const double d = q - q_src;
        return std::exp(kI * (d * d / (2.0 * t_))) / std::sqrt(2.0 * kPi * kI * t_);
    }
    const double s = std::sin(t_);
    const double c = std::cos(t_);
    return std::exp(kI * (((q * q + q_src * q_src) * c - 2.0 * q * q_src) / (2.0 * s))) /
           std::sqrt(2.0 * kPi * kI * s);
}

Eigen::MatrixXcd GreenKernel::matrix(const CoordinateGrid& grid) const {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXcd u(n, n);
    const double dq = grid.spacing();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            u(i, j) = (*this)(grid.q(static_cast<std::size_t>(i)), grid.q(static_cast<std::size_t>(j))) * dq;
        }
    }
    return u;
}

GreenKernel green_kernel(KernelKind kind, double t) {
    if (kind == KernelKind::free && std::abs(t) <= 1e-9) {
        throw CausticError("free kernel is singular at t = " + std::to_string(t));
    }
    if (kind == KernelKind::oscillator && std::abs(std::sin(t)) <= 1e-6) {
        throw CausticError("oscillator kernel is singular at t = " + std::to_string(t) + " (sin t = 0)");
    }
    return GreenKernel(kind, t);
}

WaveFunction evolve_wavefunction(const WaveFunction& psi, const GreenKernel& g) {
    const auto n = static_cast<Eigen::Index>(psi.values.size());
    const Eigen::Map<const Eigen::VectorXcd> v(psi.values.data(), n);
    const Eigen::VectorXcd out = g.matrix(psi.grid) * v;
    return {psi.grid, std::vector<cdouble>(out.data(), out.data() + n)};
}

DensityMatrix evolve_density(const DensityMatrix& rho0, const GreenKernel& g) {
    check_boundary(rho0, "initial density matrix");
    const Eigen::MatrixXcd u = g.matrix(rho0.grid);
    DensityMatrix out{rho0.grid, u * rho0.values * u.adjoint()};
    check_boundary(out, "evolved density matrix");
    return out;
}

double unitarity_defect(const GreenKernel& g, const CoordinateGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    constexpr std::array<double, 3> centers{-2.0, 0.0, 2.0};
    Eigen::MatrixXcd v(n, 9);
    Eigen::Index col = 0;
    for (const double q0 : centers) {
        for (const double p0 : centers) {
            const auto psi = make_coherent(cdouble(q0, p0) / std::numbers::sqrt2, grid);
            for (Eigen::Index i = 0; i < n; ++i) v(i, col) = psi.values[static_cast<std::size_t>(i)];
            ++col;
        }
    }
    v *= std::sqrt(grid.spacing());
    const Eigen::MatrixXcd uv = g.matrix(grid) * v;
    const Eigen::MatrixXcd d = uv.adjoint() * uv - v.adjoint() * v;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

PipelineRecord pipeline_discrepancy(const DensityMatrix& rho0, KernelKind kind, double t,
                                    const TomogramGrid& tgrid) {
    if (t < 0.0) throw TimeError("pipeline_discrepancy: negative elapsed time");
    const DensityMatrix route_a = t == 0.0 ? rho0 : evolve_density(rho0, green_kernel(kind, t));

    const Tomogram w0 = tomogram_from_density(rho0, tgrid);
    const Tomogram wt = evolve_tomogram(w0, map_for(hamiltonian_for(kind), t));
    const DensityMatrix route_b = density_from_tomogram(wt, rho0.grid).rho;

    return {kind, t, trace_distance(route_a, route_b), (route_a.values - route_b.values).cwiseAbs().maxCoeff()};
}

ClassicalTrajectory classical_trajectory(const QuadraticHamiltonian& h, double q0, double p0, double t_end,
                                         double dt) {
    if (!(t_end >= 0.0)) throw TimeError("classical_trajectory: negative elapsed time");
    if (!(dt > 0.0)) throw StepError("classical_trajectory: dt must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    const double step = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    auto f = [&](double t, double q, double p) {
        return std::array<double, 2>{p, -h.omega_sq(t) * q + h.force(t)};
    };
    ClassicalTrajectory tr;
    tr.times.push_back(0.0);
    tr.q.push_back(q0);
    tr.p.push_back(p0);
    double q = q0;
    double p = p0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = step * static_cast<double>(k);
        const auto k1 = f(t, q, p);
        const auto k2 = f(t + 0.5 * step, q + 0.5 * step * k1[0], p + 0.5 * step * k1[1]);
        const auto k3 = f(t + 0.5 * step, q + 0.5 * step * k2[0], p + 0.5 * step * k2[1]);
        const auto k4 = f(t + step, q + step * k3[0], p + step * k3[1]);
        q += step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        p += step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        tr.times.push_back(k + 1 == steps ? t_end : step * static_cast<double>(k + 1));
        tr.q.push_back(q);
        tr.p.push_back(p);
    }
    return tr;
}

GaussianMoments evolve_gaussian_moments(const QuadraticHamiltonian& h, GaussianMoments m0, double t_end,
                                        double dt) {
    if (!(t_end >= 0.0)) throw TimeError("evolve_gaussian_moments: negative elapsed time");
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    const double step = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    using State = std::array<double, 5>;
    auto f = [&](double t, const State& y) {
        const double w2 = h.omega_sq(t);
        return State{y[1], -w2 * y[0] + h.force(t), 2.0 * y[4], -2.0 * w2 * y[4], y[3] - w2 * y[2]};
    };
    auto add = [](const State& y, double a, const State& k) {
        State r;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] + a * k[i];
        return r;
    };
    State y{m0.q, m0.p, m0.var_q, m0.var_p, m0.cov_qp};
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = step * static_cast<double>(k);
        const State k1 = f(t, y);
        const State k2 = f(t + 0.5 * step, add(y, 0.5 * step, k1));
        const State k3 = f(t + 0.5 * step, add(y, 0.5 * step, k2));
        const State k4 = f(t + step, add(y, step, k3));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return {y[0], y[1], y[2], y[3], y[4]};
}

Tomogram gaussian_tomogram(const GaussianMoments& m, const TomogramGrid& tgrid) {
    Tomogram w(tgrid);
    for (std::size_t j = 0; j < tgrid.n_theta(); ++j) {
        const double c = std::cos(tgrid.theta(j));
        const double s = std::sin(tgrid.theta(j));
        const double mean = m.q * c + m.p * s;
        const double var = c * c * m.var_q + 2.0 * s * c * m.cov_qp + s * s * m.var_p;
        for (std::size_t i = 0; i < tgrid.n_x(); ++i) {
            const double d = tgrid.x(i) - mean;
            w.at(j, i) = std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
        }
    }
    return w;
}

}  // namespace tomoprop
