#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "pcgkit/common.hpp"

namespace pcgkit {

/// In-place iterative radix-2 FFT. Length must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw Error("fft_radix2: length must be a power of two");

    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * 3.14159265358979323846 / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

inline size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Magnitude spectrum of a real frame, zero-padded to the next power of two.
/// Returns bins 0..nfft/2 inclusive.
inline std::vector<double> magnitude_spectrum(const std::vector<double>& frame) {
    const size_t nfft = next_pow2(frame.size());
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    for (size_t i = 0; i < frame.size(); ++i) buf[i] = {frame[i], 0.0};
    fft_radix2(buf);
    std::vector<double> mag(nfft / 2 + 1);
    for (size_t k = 0; k <= nfft / 2; ++k) mag[k] = std::abs(buf[k]);
    return mag;
}

}  // namespace pcgkit
