#include "tomoprop/quad_dynamics.hpp"

#include "tomoprop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tomoprop {

namespace {

constexpr double kWronskianTol = 1e-8;
constexpr double kDetTol = 1e-8;
constexpr double kMassTol = 1e-8;
const cdouble kI{0.0, 1.0};

struct EpsState {
    cdouble eps;
    cdouble eps_dot;
    cdouble beta;
};

EpsState rhs(const QuadraticHamiltonian& h, double t, const EpsState& y) {
    return {y.eps_dot, -h.omega_sq(t) * y.eps, -kI / std::numbers::sqrt2 * y.eps * h.force(t)};
}

EpsState axpy(const EpsState& y, double a, const EpsState& k) {
    return {y.eps + a * k.eps, y.eps_dot + a * k.eps_dot, y.beta + a * k.beta};
}

EpsState rk4_step(const QuadraticHamiltonian& h, double t, const EpsState& y, double dt) {
    const EpsState k1 = rhs(h, t, y);
    const EpsState k2 = rhs(h, t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const EpsState k3 = rhs(h, t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const EpsState k4 = rhs(h, t + dt, axpy(y, dt, k3));
    return {y.eps + dt / 6.0 * (k1.eps + 2.0 * k2.eps + 2.0 * k3.eps + k4.eps),
            y.eps_dot + dt / 6.0 * (k1.eps_dot + 2.0 * k2.eps_dot + 2.0 * k3.eps_dot + k4.eps_dot),
            y.beta + dt / 6.0 * (k1.beta + 2.0 * k2.beta + 2.0 * k3.beta + k4.beta)};
}

double wronskian_defect(cdouble eps, cdouble eps_dot) {
    return std::abs(eps_dot * std::conj(eps) - std::conj(eps_dot) * eps - 2.0 * kI);
}

}  // namespace

// --- TimeSampler -----------------------------------------------------------

TimeSampler TimeSampler::constant(double c) {
    TimeSampler s;
    s.kind_ = Kind::constant;
    s.a_ = c;
    return s;
}

TimeSampler TimeSampler::cosine(double a, double b, double freq) {
    TimeSampler s;
    s.kind_ = Kind::cosine;
    s.a_ = a;
    s.b_ = b;
    s.freq_ = freq;
    return s;
}

TimeSampler TimeSampler::table(std::vector<double> times, std::vector<double> values) {
    if (times.size() < 2 || times.size() != values.size()) {
        throw std::invalid_argument("table sampler needs >= 2 matching (t, value) pairs");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw std::invalid_argument("table sampler times must increase");
    }
    TimeSampler s;
    s.kind_ = Kind::table;
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
}

double TimeSampler::operator()(double t) const {
    switch (kind_) {
        case Kind::constant:
            return a_;
        case Kind::cosine:
            return a_ + b_ * std::cos(freq_ * t);
        case Kind::table: {
            if (t < times_.front() || t > times_.back()) {
                throw RangeError("time " + std::to_string(t) + " outside the sampler table");
            }
            const auto it = std::upper_bound(times_.begin(), times_.end(), t);
            if (it == times_.end()) return values_.back();
            const auto k = static_cast<std::size_t>(it - times_.begin());
            const double f = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
            return (1.0 - f) * values_[k - 1] + f * values_[k];
        }
    }
    return 0.0;
}

double TimeSampler::sup(double t0, double t1) const {
    switch (kind_) {
        case Kind::constant:
            return a_;
        case Kind::cosine:
            return a_ + std::abs(b_);
        case Kind::table: {
            double m = std::max((*this)(t0), (*this)(t1));
            for (std::size_t k = 0; k < times_.size(); ++k) {
                if (times_[k] >= t0 && times_[k] <= t1) m = std::max(m, values_[k]);
            }
            return m;
        }
    }
    return 0.0;
}

bool TimeSampler::covers(double t0, double t1) const {
    return kind_ != Kind::table || (t0 >= times_.front() && t1 <= times_.back());
}

// --- epsilon trajectory ----------------------------------------------------

double EpsilonTrajectory::max_wronskian_defect() const {
    double m = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) m = std::max(m, wronskian_defect(eps[k], eps_dot[k]));
    return m;
}

EpsilonTrajectory solve_epsilon(const QuadraticHamiltonian& h, double t_end, double dt, double t_start) {
    if (!(t_end >= t_start)) throw TimeError("solve_epsilon: end time precedes start time");
    if (!h.omega_sq.covers(t_start, t_end) || !h.force.covers(t_start, t_end)) {
        throw RangeError("Hamiltonian samplers do not cover the evolution interval");
    }
    const double limit = 1e-2 / std::max(1.0, h.omega_sq.sup(t_start, t_end));
    if (!(dt > 0.0) || dt > limit) {
        throw StepError("time step " + std::to_string(dt) + " exceeds the stability limit " + std::to_string(limit));
    }
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t_start) / dt - 1e-9));
    const double step = steps > 0 ? (t_end - t_start) / static_cast<double>(steps) : 0.0;

    EpsilonTrajectory traj;
    traj.hamiltonian = h;
    traj.times.reserve(steps + 1);
    EpsState y{1.0, kI, 0.0};
    auto push = [&](double t) {
        traj.times.push_back(t);
        traj.eps.push_back(y.eps);
        traj.eps_dot.push_back(y.eps_dot);
        traj.beta.push_back(y.beta);
    };
    push(t_start);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t_start + step * static_cast<double>(k);
        y = rk4_step(h, t, y, step);
        const double defect = wronskian_defect(y.eps, y.eps_dot);
        if (defect > kWronskianTol) {
            throw StepError("Wronskian drift " + std::to_string(defect) + " at t = " + std::to_string(t + step) +
                            "; reduce dt");
        }
        push(k + 1 == steps ? t_end : t_start + step * static_cast<double>(k + 1));
    }
    return traj;
}

// --- integrals of motion ---------------------------------------------------

MotionIntegrals motion_integrals(const EpsilonTrajectory& traj, double t, DeltaSign sign) {
    const double span = traj.end() - traj.start();
    const double tol = 1e-12 * std::max(1.0, std::abs(traj.end()));
    if (t < traj.start() - tol || t > traj.end() + tol) {
        throw RangeError("time " + std::to_string(t) + " outside the trajectory [" + std::to_string(traj.start()) +
                         ", " + std::to_string(traj.end()) + "]");
    }
    EpsState y;
    if (traj.times.size() == 1 || span == 0.0) {
        y = {traj.eps[0], traj.eps_dot[0], traj.beta[0]};
    } else {
        // Bracket, then finish with a partial RK4 step to keep fourth order.
        const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
        auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - traj.times.begin() - 1, 0));
        k = std::min(k, traj.times.size() - 1);
        y = {traj.eps[k], traj.eps_dot[k], traj.beta[k]};
        const double h = t - traj.times[k];
        if (std::abs(h) > tol) y = rk4_step(traj.hamiltonian, traj.times[k], y, h);
    }

    const cdouble e = y.eps;
    const cdouble ed = y.eps_dot;
    const cdouble b = y.beta;
    MotionIntegrals mi;
    mi.t0 = traj.start();
    mi.t = t;
    mi.lambda << 0.5 * (e + std::conj(e)).real(), -0.5 * (ed + std::conj(ed)).real(),
        0.5 * (kI * (e - std::conj(e))).real(), -0.5 * (kI * (ed - std::conj(ed))).real();
    const double dp = ((b - std::conj(b)) / (kI * std::numbers::sqrt2)).real();
    mi.delta << (sign == DeltaSign::from_motion_integral ? dp : -dp), ((b + std::conj(b)) / std::numbers::sqrt2).real();
    return mi;
}

MotionIntegrals compose(const MotionIntegrals& outer, const MotionIntegrals& inner) {
    const double tol = 1e-12 * std::max(1.0, std::abs(inner.t));
    if (std::abs(outer.t0 - inner.t) > tol) {
        throw TimeError("compose: outer map starts at " + std::to_string(outer.t0) + " but inner ends at " +
                        std::to_string(inner.t));
    }
    // Q(t0) = L10 Q(t1) + D10 and Q(t1) = L21 Q(t2) + D21.
    MotionIntegrals out;
    out.t0 = inner.t0;
    out.t = outer.t;
    out.lambda = inner.lambda * outer.lambda;
    out.delta = inner.lambda * outer.delta + inner.delta;
    return out;
}

// --- optical maps ----------------------------------------------------------

OpticalAffineMap::OpticalAffineMap(const MotionIntegrals& mi) : mi_(mi) {
    if (mi.t < mi.t0) throw TimeError("optical maps are causal: t must not precede t0");
    if (mi.det_defect() > kDetTol) {
        throw InvariantError("det Lambda deviates from 1 by " + std::to_string(mi.det_defect()));
    }
    inverse_ = mi.lambda.inverse();
    offset_ = inverse_ * mi.delta;
}

MappedPoint OpticalAffineMap::operator()(double x, double theta) const {
    // Row vector N = (sin, cos) pairs with Q = (p, q); N' = N Lambda^{-1}.
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double n1 = s * inverse_(0, 0) + c * inverse_(1, 0);
    const double n2 = s * inverse_(0, 1) + c * inverse_(1, 1);
    const double r = std::hypot(n1, n2);
    const double shift = s * offset_(0) + c * offset_(1);
    double theta0 = std::atan2(n1, n2);
    double x0 = (x + shift) / r;
    if (theta0 < 0.0) {
        theta0 += std::numbers::pi;
        x0 = -x0;
    }
    if (theta0 >= std::numbers::pi) {
        theta0 -= std::numbers::pi;
        x0 = -x0;
    }
    return {x0, theta0, 1.0 / r};
}

OpticalAffineMap optical_map(const MotionIntegrals& mi) { return OpticalAffineMap(mi); }

OpticalAffineMap compose(const OpticalAffineMap& outer, const OpticalAffineMap& inner) {
    return OpticalAffineMap(compose(outer.integrals(), inner.integrals()));
}

double evolved_value(const Tomogram& w0, const OpticalAffineMap& map, double x, double theta, Interpolation interp) {
    const double x_max = w0.grid.x_max();
    const MappedPoint mp = map(x, theta);
    if (std::abs(mp.x) > x_max) {
        const double edge = w0.sample(std::copysign(x_max, mp.x), mp.theta, interp);
        if (std::abs(edge) > kMassTol) {
            throw SupportError("pulled-back point X0 = " + std::to_string(mp.x) +
                               " leaves the grid where the tomogram carries mass");
        }
        return 0.0;
    }
    return mp.weight * w0.sample(mp.x, mp.theta, interp);
}

Tomogram evolve_tomogram(const Tomogram& w0, const OpticalAffineMap& map, Interpolation interp) {
    const auto& g = w0.grid;
    Tomogram out(g);
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        for (std::size_t i = 0; i < g.n_x(); ++i) out.at(j, i) = evolved_value(w0, map, g.x(i), g.theta(j), interp);
    }
    return out;
}

OpticalAffineMap map_for(const QuadraticHamiltonian& h, double t_end, double dt, double t_start) {
    const auto traj = solve_epsilon(h, t_end, dt, t_start);
    return optical_map(motion_integrals(traj, t_end));
}

}  // namespace tomoprop
