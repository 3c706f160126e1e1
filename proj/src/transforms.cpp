#include "tomoprop/transforms.hpp"

#include "tomoprop/errors.hpp"
#include "tomoprop/fft.hpp"
#include "tomoprop/interp.hpp"
#include "tomoprop/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace tomoprop {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Fraction of each axis treated as the boundary band for support checks.
constexpr double kBoundaryBand = 0.05;
constexpr double kBoundaryMass = 1e-4;

thread_local double t_last_wigner_imag = 0.0;

long signed_index(std::size_t k, std::size_t n) {
    return k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

std::size_t wrap(long k, std::size_t n) {
    const auto m = static_cast<long>(n);
    return static_cast<std::size_t>(((k % m) + m) % m);
}

double trapezoid_weight(std::size_t i, std::size_t n, double h) {
    return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}

void check_tomogram_support(const Tomogram& w) {
    const auto& g = w.grid;
    const double edge = g.x_max() * (1.0 - kBoundaryBand);
    double mass = 0.0;
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        for (std::size_t i = 0; i < g.n_x(); ++i) {
            if (std::abs(g.x(i)) > edge) mass += g.x_weight(i) * std::abs(w.at(j, i));
        }
    }
    mass /= static_cast<double>(g.n_theta());
    if (mass > kBoundaryMass) {
        throw SupportError("tomogram carries mass " + std::to_string(mass) + " near |X| = x_max");
    }
}

void check_wigner_support(const WignerFunction& w) {
    const auto& qa = w.q_axis;
    const auto& pa = w.p_axis;
    const double qc = 0.5 * (qa.min + qa.max());
    const double pc = 0.5 * (pa.min + pa.max());
    const double qh = 0.5 * (qa.max() - qa.min) * (1.0 - kBoundaryBand);
    const double ph = 0.5 * (pa.max() - pa.min) * (1.0 - kBoundaryBand);
    double mass = 0.0;
    for (std::size_t a = 0; a < qa.n; ++a) {
        const bool q_edge = std::abs(qa.at(a) - qc) > qh;
        for (std::size_t b = 0; b < pa.n; ++b) {
            if (q_edge || std::abs(pa.at(b) - pc) > ph) mass += std::abs(w.at(a, b));
        }
    }
    mass *= qa.step * pa.step / kTwoPi;
    if (mass > kBoundaryMass) {
        throw SupportError("Wigner function carries mass " + std::to_string(mass) +
                           " in the phase-space boundary band");
    }
}

void check_theta_samples(const TomogramGrid& g) {
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        if (std::abs(std::sin(g.theta(j))) < 1e-12) throw SingularityError("theta sample with sin(theta) = 0");
    }
}

struct FftAxes {
    std::size_t fft_len;
    std::size_t half_count;  // K, with p_b = (b - K) dp
};

FftAxes p_axis_layout(const Axis& p, double dq) {
    const double m_real = kPi / (p.step * dq);
    const double m_round = std::round(m_real);
    const double k_round = std::round(-p.min / p.step);
    if (std::abs(m_real - m_round) > 1e-6 * m_round || static_cast<long>(m_round) % 2 != 0 ||
        std::abs(-p.min / p.step - k_round) > 1e-6 || p.n != 2 * static_cast<std::size_t>(k_round) + 1) {
        throw GridError("Wigner p axis is not FFT-conjugate to the coordinate grid");
    }
    const auto m = static_cast<std::size_t>(m_round);
    const auto k = static_cast<std::size_t>(k_round);
    if (m < p.n) throw GridError("Wigner p axis wider than its FFT period");
    return {m, k};
}

}  // namespace

// ---------------------------------------------------------------------------

TomogramGrid::TomogramGrid(double x_max, std::size_t n_x, std::size_t n_theta)
    : x_max_(x_max), n_x_(n_x), n_theta_(n_theta) {
    if (n_x < 16) throw GridError("tomogram grid needs n_x >= 16");
    if (n_theta < 8) throw GridError("tomogram grid needs n_theta >= 8");
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw GridError("x_max must be positive and finite");
    dx_ = 2.0 * x_max / static_cast<double>(n_x - 1);
}

double TomogramGrid::dtheta() const { return kPi / static_cast<double>(n_theta_); }
double TomogramGrid::theta(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dtheta(); }

std::pair<double, double> fold_angle(double theta, double x) {
    double k = std::floor(theta / kPi);
    double t = theta - k * kPi;
    if (t >= kPi) {
        t -= kPi;
        k += 1.0;
    }
    if (t < 0.0) t = 0.0;
    const bool odd = std::fmod(std::abs(k), 2.0) == 1.0;
    return {t, odd ? -x : x};
}

double Tomogram::row_mass(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n_x(); ++i) s += grid.x_weight(i) * at(j, i);
    return s;
}

double Tomogram::sample(double x, double theta, Interpolation interp) const {
    const auto [th, xf] = fold_angle(theta, x);
    const auto nt = static_cast<long>(grid.n_theta());
    const double t = th / grid.dtheta() - 0.5;  // in [-0.5, n_theta - 0.5)
    const double fl = std::floor(t);
    const auto j0 = static_cast<long>(fl);
    const double ft = t - fl;
    const double xi = (xf + grid.x_max()) / grid.dx();
    const double xi_flipped = (-xf + grid.x_max()) / grid.dx();

    // Row j of the twisted extension, evaluated at X = xf.
    auto row_value = [&](long j) {
        long k = j;
        bool flip = false;
        while (k < 0) {
            k += nt;
            flip = !flip;
        }
        while (k >= nt) {
            k -= nt;
            flip = !flip;
        }
        const auto r = row(static_cast<std::size_t>(k));
        const double idx = flip ? xi_flipped : xi;
        return interp == Interpolation::bilinear ? lerp_samples(r, r.size(), idx)
                                                 : cubic_samples(r, r.size(), idx);
    };

    if (interp == Interpolation::bilinear) {
        return (1.0 - ft) * row_value(j0) + ft * row_value(j0 + 1);
    }
    const auto w = lagrange4_weights(ft);
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += w[static_cast<std::size_t>(k)] * row_value(j0 - 1 + k);
    return acc;
}

TomogramInvariants Tomogram::invariants() const {
    TomogramInvariants inv;
    inv.min_value = *std::min_element(values.begin(), values.end());
    for (std::size_t j = 0; j < grid.n_theta(); ++j) {
        inv.max_row_mass_defect = std::max(inv.max_row_mass_defect, std::abs(row_mass(j) - 1.0));
    }
    return inv;
}

double tomogram_l1(const Tomogram& a, const Tomogram& b) {
    if (!(a.grid == b.grid)) throw GridError("tomogram_l1: grid mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < a.grid.n_theta(); ++j) {
        for (std::size_t i = 0; i < a.grid.n_x(); ++i) s += a.grid.x_weight(i) * std::abs(a.at(j, i) - b.at(j, i));
    }
    return s / static_cast<double>(a.grid.n_theta());
}

double tomogram_linf(const Tomogram& a, const Tomogram& b) {
    if (!(a.grid == b.grid)) throw GridError("tomogram_linf: grid mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

double WignerFunction::total_mass() const { return moment(0, 0); }

double WignerFunction::moment(int kq, int kp) const {
    double s = 0.0;
    for (std::size_t a = 0; a < q_axis.n; ++a) {
        const double wq = trapezoid_weight(a, q_axis.n, q_axis.step) * std::pow(q_axis.at(a), kq);
        for (std::size_t b = 0; b < p_axis.n; ++b) {
            s += wq * trapezoid_weight(b, p_axis.n, p_axis.step) * std::pow(p_axis.at(b), kp) * at(a, b);
        }
    }
    return s / kTwoPi;
}

// ---------------------------------------------------------------------------

std::pair<Axis, Axis> wigner_axes_for(const CoordinateGrid& grid, double p_max) {
    const double dq = grid.spacing();
    const auto min_len = static_cast<std::size_t>(std::ceil(kTwoPi / (dq * dq)));
    const std::size_t m = std::max(next_pow2(min_len), next_pow2(2 * grid.size()));
    const double dp = kPi / (static_cast<double>(m) * dq);
    if (p_max <= 0.0) p_max = grid.q_max();
    auto k = static_cast<std::size_t>(std::floor(p_max / dp));
    k = std::min(k, m / 2 - 1);
    const Axis q_axis{grid.q_min(), 0.5 * dq, 2 * grid.size() - 1};
    const Axis p_axis{-static_cast<double>(k) * dp, dp, 2 * k + 1};
    return {q_axis, p_axis};
}

double last_wigner_imag_defect() { return t_last_wigner_imag; }

WignerFunction wigner_from_density(const DensityMatrix& rho, WignerOptions opts) {
    const auto& grid = rho.grid;
    const std::size_t n = grid.size();
    if (n % 2 != 0) throw GridError("wigner_from_density needs an even number of q points");
    const auto [q_axis, p_axis] = wigner_axes_for(grid, opts.p_max);
    const double dq = grid.spacing();
    const auto [m, k_half] = p_axis_layout(p_axis, dq);
    WignerFunction w(q_axis, p_axis);
    double imag_max = 0.0;

#pragma omp parallel reduction(max : imag_max)
    {
        Fft fft(m);
        auto buf = fft.buffer();
#pragma omp for schedule(dynamic, 8)
        for (std::size_t a = 0; a < q_axis.n; ++a) {
            std::fill(buf.begin(), buf.end(), cdouble{});
            const std::size_t r = a % 2;
            const std::size_t i_lo = a >= n - 1 ? a - (n - 1) : 0;
            const std::size_t i_hi = std::min(n - 1, a);
            for (std::size_t i = i_lo; i <= i_hi; ++i) {
                const std::size_t j = a - i;
                const long k = static_cast<long>(i) - static_cast<long>((a + r) / 2);
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                buf[wrap(k, m)] = sign * rho.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            fft.forward();
            for (std::size_t b = 0; b < p_axis.n; ++b) {
                const std::size_t bf = m / 2 - k_half + b;
                const double shift = -kPi * (static_cast<double>(bf) - static_cast<double>(m / 2)) *
                                     static_cast<double>(r) / static_cast<double>(m);
                const cdouble v = 2.0 * dq * std::polar(1.0, shift) * buf[bf];
                imag_max = std::max(imag_max, std::abs(v.imag()));
                w.at(a, b) = v.real();
            }
        }
    }
    t_last_wigner_imag = imag_max;
    return w;
}

DensityMatrix density_from_wigner(const WignerFunction& w) {
    const Axis& qa = w.q_axis;
    if (qa.n % 2 == 0 || qa.n < 15) throw GridError("Wigner q axis must have an odd count 2n-1");
    if (std::abs(qa.min + qa.max()) > 1e-9 * qa.step) throw GridError("Wigner q axis must be symmetric");
    const std::size_t n = (qa.n + 1) / 2;
    const CoordinateGrid grid(qa.max(), n);
    const double dq = grid.spacing();
    const auto [m, k_half] = p_axis_layout(w.p_axis, dq);
    if (m < 2 * n) throw GridError("Wigner p axis too coarse for the coordinate grid");
    const double dp = w.p_axis.step;
    DensityMatrix rho{grid, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};

#pragma omp parallel
    {
        Fft fft(m);
        auto buf = fft.buffer();
#pragma omp for schedule(dynamic, 8)
        for (std::size_t a = 0; a < qa.n; ++a) {
            std::fill(buf.begin(), buf.end(), cdouble{});
            const std::size_t r = a % 2;
            for (std::size_t b = 0; b < w.p_axis.n; ++b) {
                const std::size_t bf = m / 2 - k_half + b;
                const double shift = kPi * (static_cast<double>(bf) - static_cast<double>(m / 2)) *
                                     static_cast<double>(r) / static_cast<double>(m);
                buf[bf] = w.at(a, b) * std::polar(1.0, shift);
            }
            fft.backward();
            const std::size_t i_lo = a >= n - 1 ? a - (n - 1) : 0;
            const std::size_t i_hi = std::min(n - 1, a);
            for (std::size_t i = i_lo; i <= i_hi; ++i) {
                const std::size_t j = a - i;
                const long k = static_cast<long>(i) - static_cast<long>((a + r) / 2);
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                rho.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    sign * dp / kTwoPi * buf[wrap(k, m)];
            }
        }
    }
    return rho;
}

// ---------------------------------------------------------------------------

namespace {

// Index span [lo, hi] of entries above `thr` in each of `count` strided lines.
std::vector<std::pair<long, long>> support_spans(const std::vector<double>& data, std::size_t count,
                                                 std::size_t len, double thr) {
    std::vector<std::pair<long, long>> spans(count, {1, 0});
    for (std::size_t r = 0; r < count; ++r) {
        const double* row = data.data() + r * len;
        long lo = -1;
        long hi = -1;
        for (std::size_t k = 0; k < len; ++k) {
            if (std::abs(row[k]) > thr) {
                if (lo < 0) lo = static_cast<long>(k);
                hi = static_cast<long>(k);
            }
        }
        if (lo >= 0) spans[r] = {lo, hi};
    }
    return spans;
}

// Sum over lines r of cubic interpolation in line r at index t0 + r * dt.
// `span_lo/hi` bound the union of all line supports.
double sweep(const std::vector<double>& data, std::size_t len, const std::vector<std::pair<long, long>>& spans,
             long span_lo, long span_hi, double t0, double dt) {
    if (span_lo > span_hi) return 0.0;
    // Restrict r to lines whose sample index can touch [span_lo - 2, span_hi + 2].
    double r_lo = 0.0;
    double r_hi = static_cast<double>(spans.size() - 1);
    const double lo_t = static_cast<double>(span_lo) - 2.0;
    const double hi_t = static_cast<double>(span_hi) + 2.0;
    if (dt != 0.0) {
        double ra = (lo_t - t0) / dt;
        double rb = (hi_t - t0) / dt;
        if (ra > rb) std::swap(ra, rb);
        r_lo = std::max(r_lo, std::floor(ra));
        r_hi = std::min(r_hi, std::ceil(rb));
    } else if (t0 < lo_t || t0 > hi_t) {
        return 0.0;
    }
    if (r_lo > r_hi) return 0.0;
    double acc = 0.0;
    const auto n = static_cast<long>(len);
    for (auto r = static_cast<std::size_t>(r_lo); r <= static_cast<std::size_t>(r_hi); ++r) {
        const auto [lo, hi] = spans[r];
        const double t = t0 + dt * static_cast<double>(r);
        const auto i0 = static_cast<long>(t + 4.0) - 4;  // floor for t > -4
        if (i0 + 2 < lo || i0 - 1 > hi) continue;
        const double f = t - static_cast<double>(i0);
        const double fm1 = f - 1.0;
        const double fm2 = f - 2.0;
        const double fp1 = f + 1.0;
        const double w0 = -f * fm1 * fm2 * (1.0 / 6.0);
        const double w1 = fp1 * fm1 * fm2 * 0.5;
        const double w2 = -fp1 * f * fm2 * 0.5;
        const double w3 = fp1 * f * fm1 * (1.0 / 6.0);
        const double* row = data.data() + r * len;
        if (i0 >= 1 && i0 + 2 < n) {
            acc += w0 * row[i0 - 1] + w1 * row[i0] + w2 * row[i0 + 1] + w3 * row[i0 + 2];
        } else {
            const double wts[4] = {w0, w1, w2, w3};
            for (long k = 0; k < 4; ++k) {
                const long idx = i0 - 1 + k;
                if (idx >= 0 && idx < n) acc += wts[k] * row[idx];
            }
        }
    }
    return acc;
}

std::pair<long, long> union_span(const std::vector<std::pair<long, long>>& spans) {
    long lo = std::numeric_limits<long>::max();
    long hi = std::numeric_limits<long>::min();
    for (const auto& [a, b] : spans) {
        if (a > b) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    return {lo, hi};
}

}  // namespace

LineIntegrator::LineIntegrator(WignerFunction w)
    : w_(std::make_shared<const WignerFunction>(std::move(w))) {
    const std::size_t nq = w_->q_axis.n;
    const std::size_t np = w_->p_axis.n;
    std::vector<double> tr(w_->values.size());
    double peak = 0.0;
    for (std::size_t a = 0; a < nq; ++a) {
        for (std::size_t b = 0; b < np; ++b) {
            tr[b * nq + a] = w_->at(a, b);
            peak = std::max(peak, std::abs(w_->at(a, b)));
        }
    }
    const double thr = 1e-16 * peak;
    row_spans_ = support_spans(w_->values, nq, np, thr);
    col_spans_ = support_spans(tr, np, nq, thr);
    transposed_ = std::make_shared<const std::vector<double>>(std::move(tr));
    row_union_ = union_span(row_spans_);
    col_union_ = union_span(col_spans_);
}

double LineIntegrator::operator()(double x, double theta) const {
    // Steps through whole grid rows (or columns, whichever the line crosses
    // more steeply) and interpolates cubically across them.
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const auto& qa = w_->q_axis;
    const auto& pa = w_->p_axis;
    if (std::abs(s) >= std::abs(c)) {
        // p(q_a) = (x - q_a c) / s
        const double t0 = pa.index_of((x - qa.min * c) / s);
        const double dt = -qa.step * c / (s * pa.step);
        return sweep(w_->values, pa.n, row_spans_, row_union_.first, row_union_.second, t0, dt) * qa.step / std::abs(s) / kTwoPi;
    }
    const double t0 = qa.index_of((x - pa.min * s) / c);
    const double dt = -pa.step * s / (c * qa.step);
    return sweep(*transposed_, qa.n, col_spans_, col_union_.first, col_union_.second, t0, dt) * pa.step / std::abs(c) / kTwoPi;
}

double radon_line(const WignerFunction& w, double x, double theta) { return LineIntegrator(w)(x, theta); }

Tomogram radon(const WignerFunction& w, const TomogramGrid& tgrid) {
    check_wigner_support(w);
    const LineIntegrator line(w);  // copies W once
    Tomogram out(tgrid);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t j = 0; j < tgrid.n_theta(); ++j) {
        const double theta = tgrid.theta(j);
        for (std::size_t i = 0; i < tgrid.n_x(); ++i) out.at(j, i) = line(tgrid.x(i), theta);
    }
    const double min_w = *std::min_element(out.values.begin(), out.values.end());
    if (min_w < -1e-6) warn("radon: tomogram has negative values down to " + std::to_string(min_w));
    return out;
}

WignerFunction inverse_radon(const Tomogram& w, const Axis& q_axis, const Axis& p_axis, FilterOptions opts) {
    check_tomogram_support(w);
    const auto& g = w.grid;
    const std::size_t nx = g.n_x();
    const std::size_t len = next_pow2(4 * nx);
    const double dx = g.dx();
    // The filtered projection is not compactly supported; keep it on an
    // extended range so back-projection at |s| > x_max stays exact.
    const std::size_t ext = (len - 2 * nx) / 2;
    const std::size_t nf = nx + 2 * ext;

    // Band-limited ramp kernel h(u) = int_{|eta|<pi/dx} |eta| e^{i eta u} d eta sampled at u = n dx.
    std::vector<cdouble> ramp(len);
    {
        Fft fft(len);
        auto buf = fft.buffer();
        for (std::size_t k = 0; k < len; ++k) {
            const long n = signed_index(k, len);
            if (n == 0) {
                buf[k] = kPi * kPi / (dx * dx);
            } else if (n % 2 != 0) {
                const auto nd = static_cast<double>(n);
                buf[k] = -4.0 / (nd * nd * dx * dx);
            } else {
                buf[k] = 0.0;
            }
        }
        fft.forward();
        for (std::size_t k = 0; k < len; ++k) {
            double f = buf[k].real();
            if (opts.hann) {
                const double frac = std::abs(static_cast<double>(signed_index(k, len))) / static_cast<double>(len / 2);
                f *= 0.5 * (1.0 + std::cos(kPi * frac));
            }
            ramp[k] = f * dx / static_cast<double>(len);
        }
    }

    std::vector<double> filtered(g.n_theta() * nf);
#pragma omp parallel
    {
        Fft fft(len);
        auto buf = fft.buffer();
#pragma omp for schedule(dynamic, 4)
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            std::fill(buf.begin(), buf.end(), cdouble{});
            for (std::size_t i = 0; i < nx; ++i) buf[i] = w.at(j, i);
            fft.forward();
            for (std::size_t k = 0; k < len; ++k) buf[k] *= ramp[k];
            fft.backward();
            for (std::size_t i = 0; i < nf; ++i) {
                const long src = static_cast<long>(i) - static_cast<long>(ext);
                filtered[j * nf + i] = buf[wrap(src, len)].real();
            }
        }
    }

    WignerFunction out(q_axis, p_axis);
    const double scale = g.dtheta() / kTwoPi;
    std::vector<double> cs(g.n_theta());
    std::vector<double> sn(g.n_theta());
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        cs[j] = std::cos(g.theta(j));
        sn[j] = std::sin(g.theta(j));
    }
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t a = 0; a < q_axis.n; ++a) {
        const double q = q_axis.at(a);
        double* row = out.values.data() + a * p_axis.n;
        for (std::size_t j = 0; j < g.n_theta(); ++j) {
            const double* f = filtered.data() + j * nf;
            const double base = (q * cs[j] + g.x_max()) / dx + static_cast<double>(ext);
            const double step = sn[j] / dx;
            for (std::size_t b = 0; b < p_axis.n; ++b) {
                const double idx = base + p_axis.at(b) * step;
                if (idx < 0.0 || idx > static_cast<double>(nf - 1)) continue;
                auto i0 = static_cast<std::size_t>(idx);
                if (i0 >= nf - 1) i0 = nf - 2;
                const double t = idx - static_cast<double>(i0);
                row[b] += (1.0 - t) * f[i0] + t * f[i0 + 1];
            }
        }
        for (std::size_t b = 0; b < p_axis.n; ++b) row[b] *= scale;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Characteristic-function route: chi(u) = int rho(q + u s/2, q - u s/2) e^{i u q c} dq,
// then w(X) = (1/2pi) int chi(u) e^{-i u X} du by FFT.
Tomogram tomogram_direct(const DensityMatrix& rho, const TomogramGrid& tgrid) {
    const std::size_t n = rho.grid.size();
    const double dq = rho.grid.spacing();
    const std::size_t nh = 2 * n - 1;
    const std::size_t nx = tgrid.n_x();
    check_theta_samples(tgrid);
    const double du = kTwoPi / (static_cast<double>(nx) * tgrid.dx());
    Tomogram out(tgrid);

#pragma omp parallel
    {
        Fft fft(nx);
        auto buf = fft.buffer();
#pragma omp for schedule(dynamic, 1)
        for (std::size_t j = 0; j < tgrid.n_theta(); ++j) {
            const double s = std::sin(tgrid.theta(j));
            const double c = std::cos(tgrid.theta(j));
            std::fill(buf.begin(), buf.end(), cdouble{});
            std::size_t quiet = 0;
            for (std::size_t k = 0; k <= nx / 2; ++k) {
                const double u = static_cast<double>(k) * du;
                const double d = u * s;  // separation q - q'
                cdouble chi = 0.0;
                for (std::size_t a = 0; a < nh; ++a) {
                    // Entries with i + j = a sit at separations m dq, m = 2i - a.
                    const std::size_t i_lo = a >= n - 1 ? a - (n - 1) : 0;
                    const std::size_t i_hi = std::min(n - 1, a);
                    const double m_lo = 2.0 * static_cast<double>(i_lo) - static_cast<double>(a);
                    const double t = (d / dq - m_lo) / 2.0;
                    const auto count = static_cast<long>(i_hi - i_lo + 1);
                    const double fl = std::floor(t);
                    if (fl < -2.0 || fl > static_cast<double>(count)) continue;
                    const auto l0 = static_cast<long>(fl);
                    const auto wts = lagrange4_weights(t - fl);
                    cdouble val = 0.0;
                    for (long l = 0; l < 4; ++l) {
                        const long idx = l0 - 1 + l;
                        if (idx < 0 || idx >= count) continue;
                        const auto i = static_cast<Eigen::Index>(i_lo) + idx;
                        val += wts[static_cast<std::size_t>(l)] * rho.values(i, static_cast<Eigen::Index>(a) - i);
                    }
                    const double q = rho.grid.q_min() + 0.5 * dq * static_cast<double>(a);
                    chi += val * std::polar(1.0, u * q * c);
                }
                chi *= 0.5 * dq;
                // e^{-i u X_i} = e^{i u x_max} e^{-2 pi i k i / nx}
                const cdouble coef = chi * std::polar(1.0, u * tgrid.x_max()) * du / kTwoPi;
                if (k == 0) {
                    buf[0] = coef;
                } else if (2 * k == nx) {
                    buf[k] = coef.real();
                } else {
                    buf[k] = coef;
                    buf[nx - k] = std::conj(coef);  // chi(-u) = conj(chi(u)) for Hermitian rho
                }
                quiet = std::abs(chi) < 1e-14 ? quiet + 1 : 0;
                if (quiet >= 24) break;
            }
            fft.forward();
            for (std::size_t i = 0; i < nx; ++i) out.at(j, i) = buf[i].real();
        }
    }
    return out;
}

}  // namespace

Tomogram tomogram_from_density(const DensityMatrix& rho, const TomogramGrid& tgrid, Route route) {
    if (route == Route::direct) return tomogram_direct(rho, tgrid);
    return radon(wigner_from_density(rho), tgrid);
}

DensityReconstruction density_from_tomogram(const Tomogram& w, const CoordinateGrid& grid, Route route,
                                            FilterOptions opts) {
    if (route == Route::direct) {
        throw SingularityError("direct reconstruction is singular on the diagonal; use density_entry_direct");
    }
    const auto [q_axis, p_axis] = wigner_axes_for(grid, w.grid.x_max());
    const auto wig = inverse_radon(w, q_axis, p_axis, opts);
    auto rho = density_from_wigner(wig);
    double defect = 0.0;
    const auto n = static_cast<Eigen::Index>(grid.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            defect = std::max(defect, std::abs(rho.values(i, j) - std::conj(rho.values(j, i))));
        }
    }
    Eigen::MatrixXcd sym = 0.5 * (rho.values + rho.values.adjoint());
    rho.values = std::move(sym);
    double min_diag = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) min_diag = std::min(min_diag, rho.values(i, i).real());
    if (min_diag < -1e-6) warn("density_from_tomogram: negative diagonal down to " + std::to_string(min_diag));
    return {std::move(rho), defect};
}

cdouble density_entry_direct(const Tomogram& w, const CoordinateGrid& grid, double q, double qp) {
    const double d = q - qp;
    if (std::abs(d) <= 3.0 * grid.spacing()) {
        throw SingularityError("direct reconstruction requested within 3 grid steps of the diagonal");
    }
    const auto& g = w.grid;
    const double eta_max = kPi / g.dx();
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        const double s = std::sin(g.theta(j));
        const double c = std::cos(g.theta(j));
        const double eta = d / s;
        if (std::abs(eta) >= eta_max) continue;
        cdouble chi = 0.0;
        for (std::size_t i = 0; i < g.n_x(); ++i) chi += g.x_weight(i) * w.at(j, i) * std::polar(1.0, eta * g.x(i));
        acc += std::abs(d) / (s * s) * chi * std::polar(1.0, -eta * 0.5 * (q + qp) * c);
    }
    return acc * g.dtheta() / kTwoPi;
}

// ---------------------------------------------------------------------------

Tomogram tomogram_from_wavefunction(const WaveFunction& psi, const TomogramGrid& tgrid) {
    // Each row is |(U(phi) psi)(X)|^2 with U the oscillator evolution for time
    // phi = theta (or theta - pi, X -> -X), realized as kick-drift-kick shears.
    constexpr std::size_t kUpsample = 8;
    const std::size_t n = psi.grid.size();
    const double dq = psi.grid.spacing();
    const std::size_t len = next_pow2(4 * n);
    const std::size_t offset = (len - n) / 2;
    const double y0 = psi.grid.q_min() - static_cast<double>(offset) * dq;
    const std::size_t up_len = len * kUpsample;
    check_theta_samples(tgrid);
    const double up_step = dq / static_cast<double>(kUpsample);
    Tomogram out(tgrid);

#pragma omp parallel
    {
        Fft fft(len);
        Fft up(up_len);
        auto buf = fft.buffer();
        auto ubuf = up.buffer();
#pragma omp for schedule(dynamic, 1)
        for (std::size_t j = 0; j < tgrid.n_theta(); ++j) {
            const double theta = tgrid.theta(j);
            const bool upper = theta > 0.5 * kPi;
            const double phi = upper ? theta - kPi : theta;
            const double kick = std::tan(0.5 * phi);
            const double drift = std::sin(phi);

            std::fill(buf.begin(), buf.end(), cdouble{});
            for (std::size_t i = 0; i < n; ++i) {
                const double y = psi.grid.q(i);
                buf[offset + i] = psi.values[i] * std::polar(1.0, -0.5 * kick * y * y);
            }
            fft.forward();
            std::fill(ubuf.begin(), ubuf.end(), cdouble{});
            const double length = static_cast<double>(len) * dq;
            for (std::size_t k = 0; k < len; ++k) {
                const long ks = signed_index(k, len);
                const double p = kTwoPi * static_cast<double>(ks) / length;
                const cdouble v = buf[k] * std::polar(1.0, -0.5 * drift * p * p) / static_cast<double>(len);
                if (2 * k == len) {
                    ubuf[k] += 0.5 * v;
                    ubuf[up_len - k] += 0.5 * v;
                } else {
                    ubuf[ks >= 0 ? static_cast<std::size_t>(ks) : up_len - static_cast<std::size_t>(-ks)] = v;
                }
            }
            up.backward();
            for (std::size_t i = 0; i < tgrid.n_x(); ++i) {
                const double x = upper ? -tgrid.x(i) : tgrid.x(i);
                const double idx = (x - y0) / up_step;
                const cdouble v = cubic_samples(std::span<const cdouble>(ubuf.data(), up_len), up_len, idx);
                out.at(j, i) = std::norm(v);
            }
        }
    }
    return out;
}

std::vector<double> moments(const Tomogram& w, int n) {
    if (n < 0 || n > 4) throw std::invalid_argument("moments: order must be in [0, 4]");
    std::vector<double> out(w.grid.n_theta());
    for (std::size_t j = 0; j < w.grid.n_theta(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.grid.n_x(); ++i) {
            s += w.grid.x_weight(i) * std::pow(w.grid.x(i), n) * w.at(j, i);
        }
        out[j] = s;
    }
    return out;
}

double SymplecticTomogram::operator()(double x, double mu, double nu) const {
    const double r = std::hypot(mu, nu);
    if (r == 0.0) throw DegenerateError("symplectic tomogram undefined at mu = nu = 0");
    const auto [theta, xf] = fold_angle(std::atan2(nu, mu), x / r);
    return line_(xf, theta) / r;
}

SymplecticTomogram symplectic_tomogram(const WignerFunction& w) { return SymplecticTomogram(LineIntegrator(w)); }

}  // namespace tomoprop
