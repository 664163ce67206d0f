#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pcgkit/audio.hpp"
#include "pcgkit/common.hpp"
#include "pcgkit/fir.hpp"
#include "pcgkit/wavelet.hpp"

namespace pcgkit {

enum class ThresholdSelection { heursure, universal, sure };
enum class ThresholdingMode { hard, soft };

inline ThresholdSelection selection_from_string(const std::string& s) {
    if (s == "heursure") return ThresholdSelection::heursure;
    if (s == "universal") return ThresholdSelection::universal;
    if (s == "sure") return ThresholdSelection::sure;
    throw Error("unknown threshold selection: " + s);
}

inline ThresholdingMode thresholding_from_string(const std::string& s) {
    if (s == "hard") return ThresholdingMode::hard;
    if (s == "soft") return ThresholdingMode::soft;
    throw Error("unknown thresholding mode: " + s);
}

/// Wavelet shrinkage policy. Noise is estimated per detail level from that
/// level's own coefficients (median absolute deviation / 0.6745).
struct DenoisePolicy {
    std::string wavelet = "db4";
    int levels = 6;
    ThresholdSelection selection = ThresholdSelection::heursure;
    ThresholdingMode thresholding = ThresholdingMode::hard;
};

namespace detail {

inline double universal_threshold(size_t n) {
    if (n <= 1) return 0.0;
    return std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

// SURE-minimizing threshold for unit-variance coefficients: evaluate the risk
// at every |c| and take the minimizer.
inline double sure_threshold(const std::vector<double>& unit_coeffs) {
    const size_t n = unit_coeffs.size();
    if (n == 0) return 0.0;
    std::vector<double> sq(n);
    for (size_t i = 0; i < n; ++i) sq[i] = unit_coeffs[i] * unit_coeffs[i];
    std::sort(sq.begin(), sq.end());

    double cumsum = 0.0;
    double best_risk = 0.0, best_t2 = 0.0;
    for (size_t k = 1; k <= n; ++k) {
        cumsum += sq[k - 1];
        const double risk =
            (static_cast<double>(n) - 2.0 * static_cast<double>(k) + cumsum +
             static_cast<double>(n - k) * sq[k - 1]) /
            static_cast<double>(n);
        if (k == 1 || risk < best_risk) {
            best_risk = risk;
            best_t2 = sq[k - 1];
        }
    }
    return std::sqrt(best_t2);
}

// Heuristic SURE: fall back to the universal threshold when the coefficient
// vector is too sparse for the SURE estimate to be trusted, otherwise take the
// smaller of the two.
inline double heursure_threshold(const std::vector<double>& unit_coeffs) {
    const size_t n = unit_coeffs.size();
    if (n == 0) return 0.0;
    double energy = 0.0;
    for (double c : unit_coeffs) energy += c * c;
    const double s = energy / static_cast<double>(n) - 1.0;
    const double log2n = std::log2(static_cast<double>(n));
    const double crit = std::sqrt(log2n * log2n * log2n / static_cast<double>(n));
    const double uni = universal_threshold(n);
    if (s <= crit) return uni;
    return std::min(sure_threshold(unit_coeffs), uni);
}

inline double select_threshold(const std::vector<double>& unit_coeffs, ThresholdSelection sel) {
    switch (sel) {
        case ThresholdSelection::universal: return universal_threshold(unit_coeffs.size());
        case ThresholdSelection::sure: return sure_threshold(unit_coeffs);
        case ThresholdSelection::heursure: return heursure_threshold(unit_coeffs);
    }
    return 0.0;
}

}  // namespace detail

/// Wavelet shrinkage. Per detail level: sigma = median(|d|)/0.6745, threshold
/// chosen on the sigma-normalized coefficients, then hard (or soft) shrinkage
/// at sigma * threshold. Approximation coefficients pass through. A level with
/// sigma = 0 passes through; if every level has sigma = 0 the input is
/// returned unchanged.
inline Signal denoise(const Signal& x, const DenoisePolicy& p) {
    WaveletDecomposition d = dwt(x, p.wavelet, p.levels);

    bool any_sigma = false;
    for (auto& level : d.details) {
        std::vector<double> abs_c(level.size());
        for (size_t i = 0; i < level.size(); ++i) abs_c[i] = std::abs(level[i]);
        const double sigma = median(abs_c) / 0.6745;
        if (sigma <= 0.0) continue;
        any_sigma = true;

        std::vector<double> unit(level.size());
        for (size_t i = 0; i < level.size(); ++i) unit[i] = level[i] / sigma;
        const double t = sigma * detail::select_threshold(unit, p.selection);

        if (p.thresholding == ThresholdingMode::hard) {
            for (auto& c : level)
                if (std::abs(c) <= t) c = 0.0;
        } else {
            for (auto& c : level) {
                const double mag = std::abs(c) - t;
                c = (mag > 0.0) ? (c > 0.0 ? mag : -mag) : 0.0;
            }
        }
    }
    if (!any_sigma) return x;
    return idwt(d);
}

/// Centre to exact zero mean, then scale into [-0.5, 0.5] with max|y| = 0.5.
inline Signal normalize_center(const Signal& x) {
    if (x.empty()) throw Error("normalize_center: empty signal");
    const double m = mean(x);
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v - m));
    if (peak == 0.0) throw Error("normalize_center: zero dynamic range");
    Signal y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = (x[i] - m) / (2.0 * peak);
    return y;
}

struct PreprocessConfig {
    double highpass_cutoff_hz = 60.0;
    int fir_base_order = 256;  // at 4 kHz; scaled with the sample rate
    DenoisePolicy denoise;
};

/// High-pass at 60 Hz (zero phase), wavelet shrinkage, then centre-and-scale.
/// Metadata is preserved.
inline AudioSample preprocess_pipeline(const AudioSample& s, const PreprocessConfig& cfg = {}) {
    if (s.sample_rate_hz <= 0) throw Error("preprocess: sample rate must be positive");
    const int order = scaled_fir_order(cfg.fir_base_order, s.sample_rate_hz);
    const FirFilter hp = design_highpass(cfg.highpass_cutoff_hz, s.sample_rate_hz, order);
    AudioSample out = s;
    out.samples = normalize_center(denoise(apply_fir(hp, s.samples), cfg.denoise));
    return out;
}

}  // namespace pcgkit
