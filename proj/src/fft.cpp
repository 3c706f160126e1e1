#include "tomoprop/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace tomoprop {

namespace {
// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    data_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!data_) throw std::bad_alloc();
    auto* raw = reinterpret_cast<fftw_complex*>(data_);
    forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (std::size_t i = 0; i < n; ++i) data_[i] = 0.0;
}

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_), data_(other.data_), forward_plan_(other.forward_plan_),
      backward_plan_(other.backward_plan_) {
    other.data_ = nullptr;
    other.forward_plan_ = nullptr;
    other.backward_plan_ = nullptr;
}

Fft::~Fft() {
    if (!data_) return;
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
    fftw_free(data_);
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void Fft::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace tomoprop
