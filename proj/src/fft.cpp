#include "binaural/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <stdexcept>

namespace binaural::fft {

std::vector<std::complex<double>> rfft(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n == 0)
        throw std::invalid_argument("rfft: empty input");
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n)
{
    if (spectrum.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum size does not match n");
    // c2r destroys its input, so work on a copy.
    std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
    std::vector<double> out(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                          reinterpret_cast<fftw_complex*>(in.data()),
                                          out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out)
        v *= scale;
    return out;
}

std::vector<std::complex<double>> cfft(std::span<const std::complex<double>> x, int sign)
{
    const std::size_t n = x.size();
    if (n == 0)
        throw std::invalid_argument("cfft: empty input");
    std::vector<std::complex<double>> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    if (sign > 0) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : out)
            v *= scale;
    }
    return out;
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("convolve: empty input");
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t nfft = next_pow2(out_len);
    std::vector<double> pa(nfft, 0.0), pb(nfft, 0.0);
    std::memcpy(pa.data(), a.data(), a.size() * sizeof(double));
    std::memcpy(pb.data(), b.data(), b.size() * sizeof(double));
    auto sa = rfft(pa);
    const auto sb = rfft(pb);
    for (std::size_t k = 0; k < sa.size(); ++k)
        sa[k] *= sb[k];
    auto full = irfft(sa, nfft);
    full.resize(out_len);
    return full;
}

}  // namespace binaural::fft
