#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace binaural::fft {

// Real-to-complex transform, one-sided spectrum of size n/2+1.
std::vector<std::complex<double>> rfft(std::span<const double> x);

// Inverse of rfft; n is the real signal length, output scaled by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n);

// Full complex transform (sign = -1 forward, +1 inverse; inverse scaled by 1/n).
std::vector<std::complex<double>> cfft(std::span<const std::complex<double>> x, int sign);

std::size_t next_pow2(std::size_t n);

// Linear convolution via zero-padded FFT, output size a.size()+b.size()-1.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

}  // namespace binaural::fft
