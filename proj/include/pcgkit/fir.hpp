#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"

namespace pcgkit {

/// Linear-phase type-I FIR filter (odd tap count).
struct FirFilter {
    std::vector<double> taps;
    double cutoff_hz = 0.0;
    std::string design;  // e.g. "hamming-sinc highpass, order 256"
};

namespace detail {

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = 3.14159265358979323846 * x;
    return std::sin(px) / px;
}

// Hamming-windowed sinc lowpass with unit DC gain, order `order` (order+1 taps).
inline std::vector<double> windowed_sinc_lowpass(double cutoff_hz, int sample_rate_hz, int order) {
    const int n_taps = order + 1;
    const double fc = cutoff_hz / static_cast<double>(sample_rate_hz);
    const double mid = order / 2.0;
    std::vector<double> h(n_taps);
    double sum = 0.0;
    for (int k = 0; k < n_taps; ++k) {
        const double w =
            0.54 - 0.46 * std::cos(2.0 * 3.14159265358979323846 * k / static_cast<double>(order));
        h[k] = 2.0 * fc * sinc(2.0 * fc * (k - mid)) * w;
        sum += h[k];
    }
    for (double& t : h) t /= sum;  // exact unit gain at DC
    return h;
}

}  // namespace detail

/// Windowed-sinc (Hamming) high-pass: spectral inversion of the unit-DC-gain
/// lowpass prototype, so the response at 0 Hz is exactly zero. Order must be
/// even (type-I linear phase).
inline FirFilter design_highpass(double cutoff_hz, int sample_rate_hz, int order) {
    if (sample_rate_hz <= 0) throw Error("design_highpass: sample rate must be positive");
    if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0)
        throw Error("design_highpass: cutoff must lie in (0, Nyquist)");
    if (order <= 0 || order % 2 != 0) throw Error("design_highpass: order must be a positive even number");

    FirFilter f;
    f.taps = detail::windowed_sinc_lowpass(cutoff_hz, sample_rate_hz, order);
    for (double& t : f.taps) t = -t;
    f.taps[order / 2] += 1.0;
    f.cutoff_hz = cutoff_hz;
    f.design = "hamming-sinc highpass, order " + std::to_string(order);
    return f;
}

/// Band-pass as the difference of two lowpass prototypes (used by the synthetic
/// generator for band-limited noise).
inline FirFilter design_bandpass(double lo_hz, double hi_hz, int sample_rate_hz, int order) {
    if (!(lo_hz > 0.0) || !(hi_hz > lo_hz) || hi_hz >= sample_rate_hz / 2.0)
        throw Error("design_bandpass: need 0 < lo < hi < Nyquist");
    if (order <= 0 || order % 2 != 0) throw Error("design_bandpass: order must be a positive even number");
    auto lp_hi = detail::windowed_sinc_lowpass(hi_hz, sample_rate_hz, order);
    auto lp_lo = detail::windowed_sinc_lowpass(lo_hz, sample_rate_hz, order);
    FirFilter f;
    f.taps.resize(lp_hi.size());
    for (size_t i = 0; i < f.taps.size(); ++i) f.taps[i] = lp_hi[i] - lp_lo[i];
    f.cutoff_hz = lo_hz;
    f.design = "hamming-sinc bandpass, order " + std::to_string(order);
    return f;
}

/// Base order 256 is calibrated for 4 kHz material; scale with the sample rate
/// so the transition width in hertz stays put. Result is kept even.
inline int scaled_fir_order(int base_order, int sample_rate_hz, int base_rate_hz = 4000) {
    long o = std::lround(static_cast<double>(base_order) * sample_rate_hz / base_rate_hz);
    if (o < 2) o = 2;
    if (o % 2 != 0) ++o;
    return static_cast<int>(o);
}

/// Zero-phase application: forward pass then time-reversed pass, which is a
/// single convolution with the filter's autocorrelation centred on each sample.
/// Output length equals input length; stopband attenuation doubles in dB.
inline Signal apply_fir(const FirFilter& f, const Signal& x) {
    const int t = static_cast<int>(f.taps.size());
    if (static_cast<int>(x.size()) <= t) throw Error("apply_fir: signal shorter than filter");

    // autocorrelation of the taps: symmetric, 2t-1 long, zero-phase by construction
    std::vector<double> g(2 * t - 1, 0.0);
    for (int lag = -(t - 1); lag <= t - 1; ++lag) {
        double acc = 0.0;
        for (int k = 0; k < t; ++k) {
            const int j = k + lag;
            if (j >= 0 && j < t) acc += f.taps[k] * f.taps[j];
        }
        g[lag + t - 1] = acc;
    }

    const int n = static_cast<int>(x.size());
    const int c = t - 1;  // centre index of g
    Signal y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const int j_lo = std::max(0, i - c);
        const int j_hi = std::min(n - 1, i + c);
        for (int j = j_lo; j <= j_hi; ++j) acc += x[j] * g[c + i - j];
        y[i] = acc;
    }
    return y;
}

}  // namespace pcgkit
