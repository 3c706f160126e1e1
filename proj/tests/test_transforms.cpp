#include "common.hpp"

#include "tomoprop/errors.hpp"
#include "tomoprop/log.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace tomoprop;
using namespace fixtures;

namespace {

const WignerFunction& wigner_vacuum() {
    static const WignerFunction w = wigner_from_density(rho_vacuum());
    return w;
}

const WignerFunction& wigner_cat() {
    static const WignerFunction w = wigner_from_density(rho_cat2());
    return w;
}

const Tomogram& radon_vacuum() {
    static const Tomogram w = radon(wigner_vacuum(), tgrid());
    return w;
}

const Tomogram& w_cat() {
    static const Tomogram w = tomogram_from_wavefunction(cat2(), tgrid());
    return w;
}

double linf(const WignerFunction& a, const WignerFunction& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

// Analytic coherent amplitude, independent of make_coherent.
cdouble coherent_amp(cdouble alpha, double q) {
    const double q0 = std::sqrt(2.0) * alpha.real();
    const double p0 = std::sqrt(2.0) * alpha.imag();
    return std::pow(kPi, -0.25) *
           std::exp(cdouble(-(q - q0) * (q - q0) / 2.0, p0 * q - alpha.real() * alpha.imag()));
}

}  // namespace

TEST_CASE("tomogram grid and angle folding") {
    const auto& g = tgrid();
    CHECK(g.theta(0) == doctest::Approx(kPi / 360.0));
    CHECK(g.theta(179) < kPi);
    CHECK(g.x(0) == -8.0);
    CHECK(g.x(1023) == doctest::Approx(8.0));
    CHECK_THROWS_AS(TomogramGrid(8.0, 15, 180), GridError);
    CHECK_THROWS_AS(TomogramGrid(8.0, 1024, 7), GridError);

    auto [t1, x1] = fold_angle(kPi + 0.3, 1.5);
    CHECK(t1 == doctest::Approx(0.3));
    CHECK(x1 == -1.5);
    auto [t2, x2] = fold_angle(-0.3, 1.5);
    CHECK(t2 == doctest::Approx(kPi - 0.3));
    CHECK(x2 == -1.5);
    auto [t3, x3] = fold_angle(2.0 * kPi + 0.3, 1.5);
    CHECK(t3 == doctest::Approx(0.3));
    CHECK(x3 == 1.5);
}

TEST_CASE("twisted extension consistency") {
    const auto& w = w_coherent1();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(-5.0, 5.0);
    std::uniform_real_distribution<double> ut(-2.0 * kPi, 2.0 * kPi);
    for (int k = 0; k < 50; ++k) {
        const double x = ux(rng);
        const double th = ut(rng);
        CHECK(w.sample(x, th) == w.sample(-x, th + kPi));
        CHECK(w.sample(x, th, Interpolation::cubic) == w.sample(-x, th + kPi, Interpolation::cubic));
    }
}

TEST_CASE("wigner_from_density") {
    SUBCASE("vacuum is 2 exp(-q^2 - p^2)") {
        const auto& w = wigner_vacuum();
        double err = 0.0;
        for (std::size_t a = 0; a < w.q_axis.n; ++a) {
            for (std::size_t b = 0; b < w.p_axis.n; ++b) {
                const double q = w.q_axis.at(a);
                const double p = w.p_axis.at(b);
                err = std::max(err, std::abs(w.at(a, b) - 2.0 * std::exp(-q * q - p * p)));
            }
        }
        CHECK(err < 1e-6);
        CHECK(w.total_mass() == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("Hermitian input gives a real result") {
        (void)wigner_from_density(rho_cat2());
        CHECK(last_wigner_imag_defect() < 1e-10);
    }
    SUBCASE("cat alpha=2 is negative near the origin") {
        const auto& w = wigner_cat();
        // Oracle: W(0,0) = int psi(u/2) psi*(-u/2) du by Simpson on the analytic amplitude.
        auto cat = [](double q) { return coherent_amp(2.0, q) + coherent_amp(-2.0, q); };
        const double n2 = 2.0 * (1.0 + std::exp(-8.0));
        const int n = 40000;
        const double a = -30.0;
        const double h = 60.0 / n;
        cdouble s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double u = a + i * h;
            const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += wgt * cat(u / 2) * std::conj(cat(-u / 2));
        }
        const double w00 = (s * h / 3.0).real() / n2;
        const auto a0 = static_cast<std::size_t>(std::lround(w.q_axis.index_of(0.0)));
        const auto b0 = static_cast<std::size_t>(std::lround(w.p_axis.index_of(0.0)));
        CHECK(w.q_axis.at(a0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(w.p_axis.at(b0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(w.at(a0, b0) == doctest::Approx(w00).epsilon(1e-6));
        const double wmin = *std::min_element(w.values.begin(), w.values.end());
        const double wmax = *std::max_element(w.values.begin(), w.values.end());
        CHECK(wmin < -0.1 * wmax);
    }
    SUBCASE("odd q count is rejected") {
        const auto r = density_from_wavefunction(make_coherent(0.0, CoordinateGrid(8.0, 255)));
        CHECK_THROWS_AS(wigner_from_density(r), GridError);
    }
}

TEST_CASE("density_from_wigner") {
    SUBCASE("vacuum") {
        const auto r = density_from_wigner(wigner_vacuum());
        double err = 0.0;
        for (std::size_t i = 0; i < 512; ++i) {
            for (std::size_t j = 0; j < 512; ++j) {
                const double q = coord().q(i);
                const double qp = coord().q(j);
                err = std::max(err, std::abs(r.values(i, j) - std::exp(-(q * q + qp * qp) / 2.0) / std::sqrt(kPi)));
            }
        }
        CHECK(err < 1e-6);
    }
    SUBCASE("round trip on coherent alpha=1") {
        const auto r = density_from_wigner(wigner_from_density(rho_coherent1()));
        CHECK((r.values - rho_coherent1().values).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("zero maps to zero") {
        WignerFunction z = wigner_vacuum();
        std::fill(z.values.begin(), z.values.end(), 0.0);
        CHECK(density_from_wigner(z).values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("axis mismatch") {
        const WignerFunction& w = wigner_vacuum();
        WignerFunction shifted(Axis{w.q_axis.min + 0.1, w.q_axis.step, w.q_axis.n}, w.p_axis);
        CHECK_THROWS_AS(density_from_wigner(shifted), GridError);
        WignerFunction stretched(w.q_axis, Axis{w.p_axis.min * 1.1, w.p_axis.step * 1.1, w.p_axis.n});
        CHECK_THROWS_AS(density_from_wigner(stretched), GridError);
    }
}

TEST_CASE("radon") {
    SUBCASE("vacuum rows are pi^-1/2 exp(-X^2)") {
        const auto& w = radon_vacuum();
        double err = 0.0;
        for (std::size_t j = 0; j < w.grid.n_theta(); ++j) {
            for (std::size_t i = 0; i < w.grid.n_x(); ++i) err = std::max(err, std::abs(w.at(j, i) - vacuum_row(w.grid.x(i))));
        }
        CHECK(err <= 1e-5);
    }
    SUBCASE("coherent alpha=1 peaks at sqrt2 cos theta") {
        const auto w = radon(wigner_from_density(rho_coherent1()), small_tgrid());
        const auto& g = w.grid;
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            const auto r = w.row(j);
            const auto best = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
            CHECK(std::abs(g.x(best) - std::sqrt(2.0) * std::cos(g.theta(j))) <= g.dx());
        }
        CHECK(w.invariants().max_row_mass_defect < 1e-3);
    }
    SUBCASE("mass at the phase-space boundary") {
        const WignerFunction& v = wigner_vacuum();
        WignerFunction w = v;
        w.at(1, w.p_axis.n / 2) = 50.0;
        CHECK_THROWS_AS(radon(w, small_tgrid()), SupportError);
    }
    SUBCASE("radon_line agrees with the grid transform") {
        const auto& w = radon_vacuum();
        CHECK(radon_line(wigner_vacuum(), w.grid.x(600), w.grid.theta(33)) == doctest::Approx(w.at(33, 600)).epsilon(1e-12));
    }
}

TEST_CASE("inverse_radon") {
    SUBCASE("vacuum tomogram reconstructs 2 exp(-q^2 - p^2)") {
        Tomogram w(tgrid());
        for (std::size_t j = 0; j < tgrid().n_theta(); ++j) {
            for (std::size_t i = 0; i < tgrid().n_x(); ++i) w.at(j, i) = vacuum_row(tgrid().x(i));
        }
        const auto& ref = wigner_vacuum();
        const auto rec = inverse_radon(w, ref.q_axis, ref.p_axis);
        CHECK(linf(rec, ref) <= 2e-3);
    }
    SUBCASE("W -> w -> W for coherent 1+0.5i") {
        const auto wig = wigner_from_density(density_from_wavefunction(coherent_c()));
        const auto rec = inverse_radon(radon(wig, tgrid()), wig.q_axis, wig.p_axis);
        CHECK(linf(rec, wig) <= 2e-3);
    }
    SUBCASE("cat fringes survive reconstruction") {
        const auto& wig = wigner_cat();
        const auto rec = inverse_radon(w_cat(), wig.q_axis, wig.p_axis);
        const double wmin = *std::min_element(rec.values.begin(), rec.values.end());
        const double wmax = *std::max_element(rec.values.begin(), rec.values.end());
        CHECK(wmin < -0.1 * wmax);
    }
    SUBCASE("Hann window only damps the reconstruction") {
        const auto& wig = wigner_vacuum();
        const auto plain = inverse_radon(w_vacuum(), wig.q_axis, wig.p_axis);
        const auto hann = inverse_radon(w_vacuum(), wig.q_axis, wig.p_axis, {.hann = true});
        CHECK(hann.total_mass() == doctest::Approx(plain.total_mass()).epsilon(1e-3));
        CHECK(linf(hann, wig) < 0.1);
    }
    SUBCASE("mass at |X| = x_max") {
        Tomogram w(small_tgrid());
        for (std::size_t j = 0; j < w.grid.n_theta(); ++j) w.at(j, 1) = 1.0 / w.grid.dx();
        const auto& wig = wigner_vacuum();
        CHECK_THROWS_AS(inverse_radon(w, wig.q_axis, wig.p_axis), SupportError);
    }
}

TEST_CASE("tomogram_from_density") {
    SUBCASE("vacuum") {
        const auto w = tomogram_from_density(rho_vacuum(), small_tgrid());
        double err = 0.0;
        for (std::size_t j = 0; j < w.grid.n_theta(); ++j) {
            for (std::size_t i = 0; i < w.grid.n_x(); ++i) err = std::max(err, std::abs(w.at(j, i) - vacuum_row(w.grid.x(i))));
        }
        CHECK(err <= 1e-5);
    }
    SUBCASE("direct and via_wigner agree on coherent alpha=1") {
        const auto a = tomogram_from_density(rho_coherent1(), small_tgrid(), Route::via_wigner);
        const auto b = tomogram_from_density(rho_coherent1(), small_tgrid(), Route::direct);
        CHECK(tomogram_linf(a, b) <= 1e-4);
    }
    SUBCASE("row nearest theta = 0 approaches the diagonal") {
        const auto w = tomogram_from_density(rho_coherent1(), tgrid(), Route::direct);
        double err = 0.0;
        for (std::size_t i = 0; i < tgrid().n_x(); ++i) {
            const double x = tgrid().x(i);
            err = std::max(err, std::abs(w.at(0, i) - std::norm(coherent_amp(1.0, x))));
        }
        CHECK(err <= 2e-3);
    }
}

TEST_CASE("density_from_tomogram") {
    SUBCASE("vacuum") {
        const auto rec = density_from_tomogram(w_vacuum(), coord());
        double err = 0.0;
        for (std::size_t i = 0; i < 512; ++i) {
            for (std::size_t j = 0; j < 512; ++j) {
                const double q = coord().q(i);
                const double qp = coord().q(j);
                err = std::max(err, std::abs(rec.rho.values(i, j) - std::exp(-(q * q + qp * qp) / 2.0) / std::sqrt(kPi)));
            }
        }
        CHECK(err <= 2e-3);
        CHECK(rec.rho.invariants().hermiticity_defect < 1e-12);
        CHECK(rec.hermiticity_defect < 1e-6);
    }
    SUBCASE("cat alpha=2 round trip") {
        const auto rec = density_from_tomogram(tomogram_from_density(rho_cat2(), tgrid()), coord());
        CHECK(trace_distance(rec.rho, rho_cat2()) <= 1e-2);
    }
    SUBCASE("direct spot check at (1, -1) on coherent alpha=1") {
        const auto rec = density_from_tomogram(w_coherent1(), coord());
        const cdouble direct = density_entry_direct(w_coherent1(), coord(), 1.0, -1.0);
        // The spot is off-grid; interpolate the via_wigner result bilinearly.
        const double fi = coord().axis().index_of(1.0);
        const double fj = coord().axis().index_of(-1.0);
        const auto i0 = static_cast<Eigen::Index>(std::floor(fi));
        const auto j0 = static_cast<Eigen::Index>(std::floor(fj));
        const double a = fi - i0;
        const double b = fj - j0;
        const auto& v = rec.rho.values;
        const cdouble via = (1 - a) * (1 - b) * v(i0, j0) + a * (1 - b) * v(i0 + 1, j0) + (1 - a) * b * v(i0, j0 + 1) +
                            a * b * v(i0 + 1, j0 + 1);
        const cdouble exact = coherent_amp(1.0, 1.0) * std::conj(coherent_amp(1.0, -1.0));
        CHECK(std::abs(direct - via) <= 5e-3);
        CHECK(std::abs(direct - exact) <= 5e-3);
    }
    SUBCASE("direct route is singular on the diagonal") {
        CHECK_THROWS_AS(density_from_tomogram(w_vacuum(), coord(), Route::direct), SingularityError);
        CHECK_THROWS_AS(density_entry_direct(w_vacuum(), coord(), 0.5, 0.5), SingularityError);
    }
}

TEST_CASE("tomogram_from_wavefunction") {
    SUBCASE("vacuum") {
        double err = 0.0;
        for (std::size_t j = 0; j < tgrid().n_theta(); ++j) {
            for (std::size_t i = 0; i < tgrid().n_x(); ++i) {
                err = std::max(err, std::abs(w_vacuum().at(j, i) - vacuum_row(tgrid().x(i))));
            }
        }
        CHECK(err < 1e-10);
    }
    SUBCASE("agrees with the density route on cat alpha=2") {
        const auto via = tomogram_from_density(rho_cat2(), tgrid());
        CHECK(tomogram_linf(via, w_cat()) <= 1e-5);
    }
    SUBCASE("theta = pi/2 row is the momentum distribution") {
        const TomogramGrid g(8.0, 1024, 9);  // theta_4 = pi/2
        REQUIRE(g.theta(4) == doctest::Approx(kPi / 2).epsilon(1e-15));
        const auto& psi = coherent_c();
        const auto w = tomogram_from_wavefunction(psi, g);
        double err = 0.0;
        for (std::size_t i = 0; i < g.n_x(); i += 7) {
            // Plain DFT sum: phi(p) = (2 pi)^-1/2 sum psi(q) e^{-ipq} dq.
            const double p = g.x(i);
            cdouble phi = 0.0;
            for (std::size_t k = 0; k < psi.values.size(); ++k) {
                phi += psi.grid.weight(k) * psi.values[k] * std::exp(cdouble(0.0, -p * psi.grid.q(k)));
            }
            err = std::max(err, std::abs(w.at(4, i) - std::norm(phi) / (2.0 * kPi)));
        }
        CHECK(err <= 1e-5);
    }
}

TEST_CASE("moments") {
    SUBCASE("vacuum second moment") {
        for (const double m : moments(w_vacuum(), 2)) CHECK(m == doctest::Approx(0.5).epsilon(2e-6));
    }
    SUBCASE("coherent first moment") {
        const cdouble alpha(1.0, 0.5);
        const auto w = tomogram_from_wavefunction(coherent_c(), tgrid());
        const auto m1 = moments(w, 1);
        for (std::size_t j = 0; j < m1.size(); ++j) {
            const double th = tgrid().theta(j);
            CHECK(std::abs(m1[j] - std::sqrt(2.0) * (alpha.real() * std::cos(th) + alpha.imag() * std::sin(th))) < 1e-6);
        }
    }
    SUBCASE("zeroth moment is the row mass") {
        for (const double m : moments(w_cat(), 0)) CHECK(std::abs(m - 1.0) < 1e-3);
    }
    SUBCASE("orders outside [0, 4]") {
        CHECK_THROWS_AS(moments(w_vacuum(), 5), std::invalid_argument);
        CHECK_THROWS_AS(moments(w_vacuum(), -1), std::invalid_argument);
    }
    SUBCASE("tomogram moments match Wigner-space moments") {
        const auto& wig = wigner_cat();
        const auto m1 = moments(w_cat(), 1);
        const auto m2 = moments(w_cat(), 2);
        const double mq = wig.moment(1, 0), mp = wig.moment(0, 1);
        const double mqq = wig.moment(2, 0), mpp = wig.moment(0, 2), mqp = wig.moment(1, 1);
        for (std::size_t j = 0; j < m1.size(); j += 9) {
            const double c = std::cos(tgrid().theta(j));
            const double s = std::sin(tgrid().theta(j));
            CHECK(std::abs(m1[j] - (c * mq + s * mp)) < 1e-4);
            CHECK(std::abs(m2[j] - (c * c * mqq + 2 * s * c * mqp + s * s * mpp)) < 1e-4);
        }
    }
}

TEST_CASE("symplectic tomogram") {
    const auto m = symplectic_tomogram(wigner_vacuum());
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::uniform_real_distribution<double> ut(0.0, kPi);
    std::uniform_real_distribution<double> um(-2.0, 2.0);

    SUBCASE("optical restriction") {
        for (int k = 0; k < 20; ++k) {
            const double x = ux(rng);
            const double th = ut(rng);
            CHECK(std::abs(m(x, std::cos(th), std::sin(th)) - radon_line(wigner_vacuum(), x, th)) < 1e-6);
        }
    }
    SUBCASE("homogeneity") {
        const auto mc = symplectic_tomogram(wigner_cat());
        for (const double lambda : {-2.0, 0.5, 3.0}) {
            for (int k = 0; k < 20; ++k) {
                const double x = ux(rng);
                const double mu = um(rng);
                const double nu = um(rng);
                CHECK(std::abs(std::abs(lambda) * mc(lambda * x, lambda * mu, lambda * nu) - mc(x, mu, nu)) < 1e-6);
            }
        }
    }
    SUBCASE("vacuum closed form") {
        for (int k = 0; k < 20; ++k) {
            const double x = ux(rng);
            const double mu = um(rng);
            const double nu = um(rng);
            const double r2 = mu * mu + nu * nu;
            CHECK(std::abs(m(x, mu, nu) - std::exp(-x * x / r2) / std::sqrt(kPi * r2)) < 1e-5);
        }
    }
    SUBCASE("degenerate frame") { CHECK_THROWS_AS(m(0.3, 0.0, 0.0), DegenerateError); }
}

TEST_CASE("distances and invariants") {
    CHECK(tomogram_l1(w_vacuum(), w_vacuum()) == 0.0);
    CHECK(tomogram_l1(w_vacuum(), w_coherent1()) > 0.1);
    CHECK_THROWS_AS(tomogram_l1(w_vacuum(), Tomogram(small_tgrid())), GridError);
    CHECK(w_vacuum().invariants().ok());
    CHECK_FALSE(Tomogram(small_tgrid()).invariants().ok());
}
