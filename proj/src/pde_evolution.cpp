#include "tomoprop/pde_evolution.hpp"

#include "tomoprop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace tomoprop {

namespace {

constexpr double kMassTol = 1e-8;

// The X equation is affine in X with row-wide coefficients, so one row is
// advanced as a block: X' = a(t, theta) X + b(t, theta).
struct RowCoefficients {
    double a;
    double b;
    double dtheta;
};

RowCoefficients coefficients(double t, double theta, const QuadraticHamiltonian& h) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double w2 = h.omega_sq(t);
    return {(1.0 - w2) * s * c, h.force(t) * s, -(c * c + w2 * s * s)};
}

}  // namespace

CharacteristicRate characteristic_rhs(const CharacteristicState& st, double t, const QuadraticHamiltonian& h) {
    const auto k = coefficients(t, st.theta, h);
    return {k.a * st.x + k.b, k.dtheta, -k.a};
}

double max_semilagrangian_step(const QuadraticHamiltonian& h, double t_end) {
    return 5e-3 * std::min(1.0, 1.0 / std::max(h.omega_sq.sup(0.0, t_end), 1e-300));
}

Tomogram evolve_semilagrangian(const Tomogram& w0, const QuadraticHamiltonian& h, double t_end, double dt) {
    if (!(t_end >= 0.0)) throw TimeError("evolve_semilagrangian: negative elapsed time");
    if (!h.omega_sq.covers(0.0, t_end) || !h.force.covers(0.0, t_end)) {
        throw RangeError("Hamiltonian samplers do not cover the evolution interval");
    }
    const double limit = max_semilagrangian_step(h, t_end);
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
        throw StepError("time step " + std::to_string(dt) + " exceeds the limit " + std::to_string(limit));
    }
    const auto& g = w0.grid;
    const std::size_t nx = g.n_x();
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    const double h_step = steps > 0 ? -t_end / static_cast<double>(steps) : 0.0;

    Tomogram out(g);
    const auto n_theta = static_cast<long>(g.n_theta());
    bool escaped = false;
    double escaped_x = 0.0;

#pragma omp parallel for schedule(dynamic)
    for (long jl = 0; jl < n_theta; ++jl) {
        const auto j = static_cast<std::size_t>(jl);
        std::vector<double> x(nx), k1(nx), k2(nx), k3(nx), k4(nx), tmp(nx);
        for (std::size_t i = 0; i < nx; ++i) x[i] = g.x(i);
        double theta = g.theta(j);
        double log_amp = 0.0;  // ln amp(T) - ln amp(t)

        auto stage = [&](double t, double th, const std::vector<double>& xs, std::vector<double>& kx, double& kth,
                         double& kl) {
            const auto c = coefficients(t, th, h);
            for (std::size_t i = 0; i < nx; ++i) kx[i] = c.a * xs[i] + c.b;
            kth = c.dtheta;
            kl = -c.a;
        };

        for (std::size_t n = 0; n < steps; ++n) {
            const double t = t_end + h_step * static_cast<double>(n);
            double th1, th2, th3, th4, l1, l2, l3, l4;
            stage(t, theta, x, k1, th1, l1);
            for (std::size_t i = 0; i < nx; ++i) tmp[i] = x[i] + 0.5 * h_step * k1[i];
            stage(t + 0.5 * h_step, theta + 0.5 * h_step * th1, tmp, k2, th2, l2);
            for (std::size_t i = 0; i < nx; ++i) tmp[i] = x[i] + 0.5 * h_step * k2[i];
            stage(t + 0.5 * h_step, theta + 0.5 * h_step * th2, tmp, k3, th3, l3);
            for (std::size_t i = 0; i < nx; ++i) tmp[i] = x[i] + h_step * k3[i];
            stage(t + h_step, theta + h_step * th3, tmp, k4, th4, l4);
            for (std::size_t i = 0; i < nx; ++i) {
                x[i] += h_step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            theta += h_step / 6.0 * (th1 + 2.0 * th2 + 2.0 * th3 + th4);
            log_amp -= h_step / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        }

        const double amp = std::exp(log_amp);
        for (std::size_t i = 0; i < nx; ++i) {
            if (std::abs(x[i]) > g.x_max()) {
                const double edge = w0.sample(std::copysign(g.x_max(), x[i]), theta);
                if (std::abs(edge) > kMassTol) {
#pragma omp critical(tomoprop_pde_escape)
                    {
                        escaped = true;
                        escaped_x = x[i];
                    }
                }
                continue;
            }
            out.at(j, i) = amp * w0.sample(x[i], theta);
        }
    }
    if (escaped) {
        throw SupportError("backward characteristic reached X = " + std::to_string(escaped_x) +
                           " outside the grid where the tomogram carries mass");
    }
    return out;
}

}  // namespace tomoprop
