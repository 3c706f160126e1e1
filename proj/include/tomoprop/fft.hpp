#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tomoprop {

// In-place complex DFT of a fixed length, backed by FFTW.
//   forward:  X_k = sum_j x_j exp(-2 pi i jk/N)
//   backward: x_j = sum_k X_k exp(+2 pi i jk/N)   (unnormalized)
// Plans are created with FFTW_ESTIMATE so results are bit-reproducible.
// An instance owns its buffer and must not be shared between threads.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&&) = delete;

    std::size_t size() const { return n_; }
    std::span<std::complex<double>> buffer() { return {data_, n_}; }

    void forward();
    void backward();

private:
    std::size_t n_;
    std::complex<double>* data_;
    void* forward_plan_;
    void* backward_plan_;
};

std::size_t next_pow2(std::size_t n);

}  // namespace tomoprop
