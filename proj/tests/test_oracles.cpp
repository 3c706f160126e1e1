#include "common.hpp"

#include "tomoprop/errors.hpp"
#include "tomoprop/log.hpp"
#include "tomoprop/oracles.hpp"

#include <doctest.h>

using namespace tomoprop;
using namespace fixtures;

namespace {

double mean_q(const WaveFunction& psi) {
    double s = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) s += psi.grid.weight(i) * psi.grid.q(i) * std::norm(psi.values[i]);
    return s;
}

double variance_q(const WaveFunction& psi) {
    const double m = mean_q(psi);
    double s = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double d = psi.grid.q(i) - m;
        s += psi.grid.weight(i) * d * d * std::norm(psi.values[i]);
    }
    return s;
}

}  // namespace

TEST_CASE("green kernels") {
    SUBCASE("oscillator at pi/2 has constant modulus") {
        const auto g = green_kernel(KernelKind::oscillator, kPi / 2);
        for (const double q : {-2.0, 0.0, 1.5}) {
            for (const double qs : {-1.0, 0.3, 4.0}) CHECK(std::abs(g(q, qs)) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)));
        }
    }
    SUBCASE("free spreading of the vacuum") {
        const double t = 0.5;
        const auto psi = evolve_wavefunction(vacuum(), green_kernel(KernelKind::free, t));
        double err = 0.0;
        const double var = (1.0 + t * t) / 2.0;
        for (std::size_t i = 0; i < psi.values.size(); ++i) {
            const double q = psi.grid.q(i);
            err = std::max(err, std::abs(std::norm(psi.values[i]) - std::exp(-q * q / (2 * var)) / std::sqrt(2 * kPi * var)));
        }
        CHECK(err <= 1e-5);
        CHECK(variance_q(psi) == doctest::Approx(var).epsilon(1e-5));
    }
    SUBCASE("oscillator leaves the vacuum density invariant") {
        for (const double t : {0.3, 1.0, 2.5}) {
            const auto psi = evolve_wavefunction(vacuum(), green_kernel(KernelKind::oscillator, t));
            double err = 0.0;
            for (std::size_t i = 0; i < psi.values.size(); ++i) err = std::max(err, std::abs(std::norm(psi.values[i]) - std::norm(vacuum().values[i])));
            CHECK(err <= 1e-6);
        }
    }
    SUBCASE("principal branch: short-time free kernel tends to a positive delta") {
        // int G(0, x) exp(-x^2/2) dx = (1 + i t)^-1/2 on the principal branch; Simpson on a grid fine enough
        // for the chirp.
        for (const double t : {1e-3, 1e-2, 0.2}) {
            const auto g = green_kernel(KernelKind::free, t);
            const int n = 400000;
            const double a = -9.0, h = 18.0 / n;
            cdouble s = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double x = a + i * h;
                const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                s += wgt * g(0.0, x) * std::exp(-x * x / 2.0);
            }
            s *= h / 3.0;
            CHECK(std::abs(s - 1.0 / std::sqrt(cdouble(1.0, t))) < 1e-6);
            CHECK(s.real() > 0.9);
        }
    }
    SUBCASE("caustics") {
        CHECK_THROWS_AS(green_kernel(KernelKind::free, 0.0), CausticError);
        CHECK_THROWS_AS(green_kernel(KernelKind::oscillator, kPi), CausticError);
        CHECK_THROWS_AS(green_kernel(KernelKind::oscillator, 0.0), CausticError);
        CHECK_NOTHROW(green_kernel(KernelKind::oscillator, kPi - 1e-3));
    }
    SUBCASE("discretized unitarity") {
        for (const double t : {0.3, 0.5, 1.0, kPi / 3}) {
            CHECK(unitarity_defect(green_kernel(KernelKind::free, t), coord()) <= 1e-3);
            CHECK(unitarity_defect(green_kernel(KernelKind::oscillator, t), coord()) <= 1e-3);
        }
    }
}

TEST_CASE("evolve_density") {
    SUBCASE("vacuum is stationary under the oscillator") {
        const auto r = evolve_density(rho_vacuum(), green_kernel(KernelKind::oscillator, 1.0));
        CHECK((r.values - rho_vacuum().values).cwiseAbs().maxCoeff() <= 1e-5);
    }
    SUBCASE("coherent centre rotates") {
        for (const double t : {0.5, 1.0, 2.0}) {
            const auto psi = evolve_wavefunction(coherent1(), green_kernel(KernelKind::oscillator, t));
            CHECK(mean_q(psi) == doctest::Approx(std::sqrt(2.0) * std::cos(t)).epsilon(1e-4));
            CHECK(mean_momentum(psi) == doctest::Approx(-std::sqrt(2.0) * std::sin(t)).epsilon(1e-4));
        }
    }
    SUBCASE("trace and Hermiticity") {
        for (const auto kind : {KernelKind::free, KernelKind::oscillator}) {
            const auto r = evolve_density(rho_cat2(), green_kernel(kind, 0.5));
            CHECK(std::abs(r.trace() - 1.0) <= 1e-3);
            CHECK((r.values - r.values.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    SUBCASE("boundary mass") {
        CHECK_THROWS_AS(evolve_density(density_from_wavefunction(make_coherent({2.0, 2.0}, coord())),
                                       green_kernel(KernelKind::free, 3.0)),
                        SupportError);
    }
}

TEST_CASE("classical trajectory and Ehrenfest consistency") {
    const QuadraticHamiltonian forced{TimeSampler::constant(1.0), TimeSampler::constant(0.3)};
    SUBCASE("step halving") {
        const auto a = classical_trajectory(forced, 1.0, 0.5, 3.0, 1e-3);
        const auto b = classical_trajectory(forced, 1.0, 0.5, 3.0, 5e-4);
        CHECK(std::abs(a.q.back() - b.q.back()) <= 1e-9);
        CHECK(std::abs(a.p.back() - b.p.back()) <= 1e-9);
    }
    SUBCASE("resonant closed form") {
        const auto a = classical_trajectory(forced, 0.0, 0.0, 2.0);
        CHECK(a.q.back() == doctest::Approx(0.3 * (1.0 - std::cos(2.0))).epsilon(1e-10));
        CHECK(a.p.back() == doctest::Approx(0.3 * std::sin(2.0)).epsilon(1e-10));
    }
    SUBCASE("kernel-evolved means follow the classical path") {
        for (const auto kind : {KernelKind::free, KernelKind::oscillator}) {
            const auto psi = evolve_wavefunction(coherent_c(), green_kernel(kind, 1.0));
            const auto cl = classical_trajectory(hamiltonian_for(kind), std::sqrt(2.0), std::sqrt(2.0) * 0.5, 1.0);
            CHECK(std::abs(mean_q(psi) - cl.q.back()) <= 1e-4);
            CHECK(std::abs(mean_momentum(psi) - cl.p.back()) <= 1e-4);
        }
    }
    SUBCASE("Gaussian moments") {
        const auto m = evolve_gaussian_moments(QuadraticHamiltonian::free(), {}, 1.0);
        CHECK(m.var_q == doctest::Approx(1.0));  // (1 + t^2)/2
        CHECK(m.cov_qp == doctest::Approx(0.5));
        CHECK(m.var_p == doctest::Approx(0.5));
    }
}

TEST_CASE("pipeline discrepancy") {
    // Coarse reconstructions ring slightly below zero on the diagonal; keep the output quiet.
    int warnings = 0;
    const auto previous = set_warning_handler([&](const std::string&) { ++warnings; });
    SUBCASE("vacuum under the oscillator") {
        const auto rec = pipeline_discrepancy(rho_vacuum(), KernelKind::oscillator, 1.0, small_tgrid());
        CHECK(rec.trace_distance <= 1e-2);
    }
    SUBCASE("coherent under free motion") {
        const auto rec = pipeline_discrepancy(rho_coherent1(), KernelKind::free, 0.5, small_tgrid());
        CHECK(rec.trace_distance <= 1e-2);
    }
    SUBCASE("t = 0 reduces to the transform round trip") {
        const auto rec = pipeline_discrepancy(rho_coherent1(), KernelKind::free, 0.0, small_tgrid());
        const auto round = density_from_tomogram(tomogram_from_density(rho_coherent1(), small_tgrid()), coord());
        CHECK(rec.trace_distance == doctest::Approx(trace_distance(rho_coherent1(), round.rho)).epsilon(1e-12));
        CHECK(rec.trace_distance <= 1e-2);
    }
    SUBCASE("refinement reduces the gap") {
        const auto coarse = pipeline_discrepancy(rho_coherent1(), KernelKind::free, 0.5, TomogramGrid(8.0, 128, 24));
        const auto fine = pipeline_discrepancy(rho_coherent1(), KernelKind::free, 0.5, small_tgrid());
        CHECK(fine.trace_distance < coarse.trace_distance);
    }
    set_warning_handler(previous);
}
