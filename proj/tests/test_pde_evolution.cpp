#include "common.hpp"

#include "tomoprop/errors.hpp"
#include "tomoprop/oracles.hpp"
#include "tomoprop/pde_evolution.hpp"

#include <doctest.h>

#include <cmath>

using namespace tomoprop;
using namespace fixtures;

namespace {

const QuadraticHamiltonian kMathieu{TimeSampler::cosine(1.0, 0.2, 2.0), TimeSampler::constant(0.0)};
const QuadraticHamiltonian kForced{TimeSampler::constant(1.0), TimeSampler::constant(0.3)};
const QuadraticHamiltonian kForcedMathieu{TimeSampler::cosine(1.0, 0.2, 2.0), TimeSampler::constant(0.3)};

Tomogram semilagrangian(const Tomogram& w0, const QuadraticHamiltonian& h, double t) {
    return evolve_semilagrangian(w0, h, t, max_semilagrangian_step(h, t));
}

}  // namespace

TEST_CASE("characteristic_rhs") {
    SUBCASE("harmonic is pure theta advection") {
        const auto r = characteristic_rhs({0.7, 1.1, 1.0}, 0.3, QuadraticHamiltonian::harmonic());
        CHECK(r.dtheta == doctest::Approx(-1.0));
        CHECK(r.dx == doctest::Approx(0.0));
        CHECK(r.dlog_amp == doctest::Approx(0.0));
    }
    SUBCASE("free motion: d(tan theta)/dt = -1") {
        for (const double th : {0.2, 0.9, 2.4}) {
            const auto r = characteristic_rhs({0.0, th, 1.0}, 0.0, QuadraticHamiltonian::free());
            const double c = std::cos(th);
            CHECK(r.dtheta / (c * c) == doctest::Approx(-1.0));
        }
    }
    SUBCASE("theta = 0 and pi/2 leave only the force term") {
        const QuadraticHamiltonian h{TimeSampler::constant(0.4), TimeSampler::constant(0.3)};
        const auto a = characteristic_rhs({2.0, 0.0, 1.0}, 0.0, h);
        CHECK(a.dx == doctest::Approx(0.0));
        const auto b = characteristic_rhs({2.0, kPi / 2, 1.0}, 0.0, h);
        CHECK(b.dx == doctest::Approx(0.3));
        CHECK(std::isfinite(b.dtheta));
    }
}

TEST_CASE("evolve_semilagrangian") {
    SUBCASE("harmonic coherent equals the theta-shifted tomogram") {
        const double t = kPi / 3;
        const auto w = semilagrangian(w_coherent1(), QuadraticHamiltonian::harmonic(), t);
        double err = 0.0;
        for (std::size_t j = 0; j < tgrid().n_theta(); ++j) {
            for (std::size_t i = 0; i < tgrid().n_x(); ++i) {
                err = std::max(err, std::abs(w.at(j, i) - w_coherent1().sample(tgrid().x(i), tgrid().theta(j) + t)));
            }
        }
        CHECK(err <= 1e-3);
    }
    SUBCASE("free vacuum matches the spread Gaussian") {
        const auto w = semilagrangian(w_vacuum(), QuadraticHamiltonian::free(), 1.0);
        double err = 0.0;
        for (std::size_t j = 0; j < tgrid().n_theta(); ++j) {
            const double s = std::sin(tgrid().theta(j)), c = std::cos(tgrid().theta(j));
            const double r = std::hypot(s + c, c);
            for (std::size_t i = 0; i < tgrid().n_x(); ++i) err = std::max(err, std::abs(w.at(j, i) - scaled_vacuum(tgrid().x(i), r)));
        }
        CHECK(err <= 5e-3);
    }
    SUBCASE("backend agreement across the Hamiltonian matrix") {
        const QuadraticHamiltonian matrix[] = {QuadraticHamiltonian::free(), QuadraticHamiltonian::harmonic(), kMathieu,
                                               kForced, kForcedMathieu};
        for (const auto& h : matrix) {
            const auto pde = semilagrangian(w_coherent1(), h, 1.0);
            const auto map = evolve_tomogram(w_coherent1(), map_for(h, 1.0));
            CHECK(tomogram_l1(pde, map) <= 1e-2);
            const auto inv = pde.invariants();
            CHECK(inv.max_row_mass_defect <= 2e-3);
            CHECK(inv.min_value >= -1e-6);
        }
    }
    SUBCASE("both backends converge to the Gaussian reference") {
        const GaussianMoments g0{std::sqrt(2.0), 0.0, 0.5, 0.5, 0.0};
        const auto gt = evolve_gaussian_moments(kForcedMathieu, g0, 1.0);
        double prev = 0.0;
        for (const auto [nx, nt] : {std::pair<std::size_t, std::size_t>{256, 45}, {512, 90}, {1024, 180}}) {
            const TomogramGrid g(8.0, nx, nt);
            const auto w0 = gaussian_tomogram(g0, g);
            const double err = tomogram_l1(semilagrangian(w0, kForcedMathieu, 1.0), gaussian_tomogram(gt, g));
            if (prev > 0.0) CHECK(err < 0.5 * prev);
            prev = err;
        }
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(evolve_semilagrangian(w_vacuum(), kMathieu, 1.0, 1e-2), StepError);
        CHECK_THROWS_AS(evolve_semilagrangian(w_vacuum(), kMathieu, -1.0, 1e-3), TimeError);
        Tomogram edge(tgrid());
        for (std::size_t j = 0; j < tgrid().n_theta(); ++j) {
            for (std::size_t i = 0; i < tgrid().n_x(); ++i) edge.at(j, i) = vacuum_row(tgrid().x(i) - 6.5);
        }
        CHECK_THROWS_AS(semilagrangian(edge, QuadraticHamiltonian::free(), 1.0), SupportError);
    }
}
