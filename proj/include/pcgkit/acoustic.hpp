#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"
#include "pcgkit/fft.hpp"

namespace pcgkit {

// Frame-level acoustic feature bank: 20 low-level descriptors summarized by 11
// functionals each, 220 values total. The descriptors, in output order:
//   rms, zcr, spectral centroid, spectral spread, spectral rolloff (0.85),
//   spectral flux, spectral entropy, mfcc1..mfcc13
// and the functionals:
//   mean, std, min, max, range, median, q1, q3, skewness, kurtosis, slope
// Spectral descriptors use a Hann-windowed frame zero-padded to the next power
// of two; MFCCs come from a 26-band mel filterbank with an orthonormal DCT-II,
// keeping coefficients 1..13 (c0 is redundant with the rms track).
struct AcousticConfig {
    double frame_len_s = 0.025;
    double hop_s = 0.010;
    double rolloff_fraction = 0.85;
    int mel_bands = 26;
    int mfcc_count = 13;

    int lld_count() const { return 7 + mfcc_count; }
    int functional_count() const { return 11; }
    int vector_length() const { return lld_count() * functional_count(); }

    std::string canonical_string() const {
        std::ostringstream os;
        os << "acoustic{frame_len_s=" << frame_len_s << ",hop_s=" << hop_s
           << ",rolloff=" << rolloff_fraction << ",mel_bands=" << mel_bands
           << ",mfcc=" << mfcc_count << "}";
        return os.str();
    }
};

namespace detail {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filterbank over FFT bins 0..n_bins-1 (bin spacing fs/nfft).
inline std::vector<std::vector<double>> mel_filterbank(int bands, int n_bins, int nfft, int fs) {
    std::vector<double> centers(bands + 2);
    const double mel_max = hz_to_mel(fs / 2.0);
    for (int i = 0; i < bands + 2; ++i)
        centers[i] = mel_to_hz(mel_max * i / static_cast<double>(bands + 1));

    std::vector<std::vector<double>> fb(bands, std::vector<double>(n_bins, 0.0));
    for (int b = 0; b < bands; ++b) {
        const double lo = centers[b], mid = centers[b + 1], hi = centers[b + 2];
        for (int k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * fs / nfft;
            if (f > lo && f < mid)
                fb[b][k] = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi)
                fb[b][k] = (hi - f) / (hi - mid);
        }
    }
    return fb;
}

// Orthonormal DCT-II row for coefficient c over `n` inputs.
inline std::vector<double> dct_row(int c, int n) {
    std::vector<double> row(n);
    const double norm = (c == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < n; ++i)
        row[i] = norm * std::cos(3.14159265358979323846 * c * (2 * i + 1) / (2.0 * n));
    return row;
}

inline double quantile_linear(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = static_cast<size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

/// The 11 functionals of one descriptor track, in documented order.
inline std::vector<double> functionals(const std::vector<double>& track) {
    const size_t n = track.size();
    if (n == 0) return std::vector<double>(11, 0.0);
    const double m = mean(track);
    const double sd = stddev_pop(track);
    const double mn = *std::min_element(track.begin(), track.end());
    const double mx = *std::max_element(track.begin(), track.end());

    double skew = 0.0, kurt = 0.0;
    if (sd > 0.0) {
        double m3 = 0.0, m4 = 0.0;
        for (double x : track) {
            const double d = x - m;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m3 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        skew = m3 / (sd * sd * sd);
        kurt = m4 / (sd * sd * sd * sd) - 3.0;  // excess
    }

    // least-squares slope over the frame index
    double slope = 0.0;
    if (n >= 2) {
        const double tm = (static_cast<double>(n) - 1.0) / 2.0;
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double dt = static_cast<double>(i) - tm;
            num += dt * (track[i] - m);
            den += dt * dt;
        }
        slope = num / den;
    }

    return {m,
            sd,
            mn,
            mx,
            mx - mn,
            median(track),
            detail::quantile_linear(track, 0.25),
            detail::quantile_linear(track, 0.75),
            skew,
            kurt,
            slope};
}

inline const std::vector<std::string>& functional_names() {
    static const std::vector<std::string> n = {"mean", "std",  "min",  "max",      "range",    "median",
                                               "q1",   "q3",   "skew", "kurtosis", "slope"};
    return n;
}

inline std::vector<std::string> acoustic_feature_names(const AcousticConfig& cfg) {
    std::vector<std::string> lld = {"rms",     "zcr",  "spectral_centroid", "spectral_spread",
                                    "spectral_rolloff", "spectral_flux", "spectral_entropy"};
    for (int c = 1; c <= cfg.mfcc_count; ++c) lld.push_back("mfcc" + std::to_string(c));
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(cfg.vector_length()));
    for (const auto& l : lld)
        for (const auto& f : functional_names()) names.push_back(l + "_" + f);
    return names;
}

/// Frame the signal, compute each descriptor per frame, then summarize each
/// descriptor track with the functionals. Output length is fixed by the config
/// regardless of signal duration.
inline std::vector<double> acoustic_features(const Signal& x, int sample_rate_hz,
                                             const AcousticConfig& cfg = {}) {
    if (sample_rate_hz <= 0) throw Error("acoustic_features: sample rate must be positive");
    const int frame_len = std::max(2, static_cast<int>(std::lround(cfg.frame_len_s * sample_rate_hz)));
    const int hop = std::max(1, static_cast<int>(std::lround(cfg.hop_s * sample_rate_hz)));
    const int n = static_cast<int>(x.size());
    if (n < frame_len) throw Error("acoustic_features: signal shorter than one frame");

    const int n_frames = 1 + (n - frame_len) / hop;
    const size_t nfft = next_pow2(static_cast<size_t>(frame_len));
    const int n_bins = static_cast<int>(nfft / 2 + 1);

    std::vector<double> hann(frame_len);
    for (int i = 0; i < frame_len; ++i)
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * i / (frame_len - 1));

    const auto fb = detail::mel_filterbank(cfg.mel_bands, n_bins, static_cast<int>(nfft),
                                           sample_rate_hz);
    std::vector<std::vector<double>> dct(cfg.mfcc_count);
    for (int c = 1; c <= cfg.mfcc_count; ++c) dct[c - 1] = detail::dct_row(c, cfg.mel_bands);

    const int n_llds = cfg.lld_count();
    std::vector<std::vector<double>> tracks(n_llds, std::vector<double>(n_frames, 0.0));
    std::vector<double> prev_mag;

    for (int fidx = 0; fidx < n_frames; ++fidx) {
        const int off = fidx * hop;

        double energy = 0.0;
        int crossings = 0;
        for (int i = 0; i < frame_len; ++i) {
            const double v = x[off + i];
            energy += v * v;
            if (i > 0 && ((v > 0.0 && x[off + i - 1] < 0.0) || (v < 0.0 && x[off + i - 1] > 0.0)))
                ++crossings;
        }
        tracks[0][fidx] = std::sqrt(energy / frame_len);
        tracks[1][fidx] = static_cast<double>(crossings) / (frame_len - 1);

        std::vector<double> w(frame_len);
        for (int i = 0; i < frame_len; ++i) w[i] = x[off + i] * hann[i];
        std::vector<double> mag = magnitude_spectrum(w);

        double mag_sum = 0.0, weighted = 0.0, power_sum = 0.0;
        for (int k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(nfft);
            mag_sum += mag[k];
            weighted += f * mag[k];
            power_sum += mag[k] * mag[k];
        }
        const double centroid = mag_sum > 0.0 ? weighted / mag_sum : 0.0;
        tracks[2][fidx] = centroid;

        double spread = 0.0;
        if (mag_sum > 0.0) {
            for (int k = 0; k < n_bins; ++k) {
                const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(nfft);
                spread += (f - centroid) * (f - centroid) * mag[k];
            }
            spread = std::sqrt(spread / mag_sum);
        }
        tracks[3][fidx] = spread;

        double rolloff = 0.0;
        if (power_sum > 0.0) {
            double acc = 0.0;
            for (int k = 0; k < n_bins; ++k) {
                acc += mag[k] * mag[k];
                if (acc >= cfg.rolloff_fraction * power_sum) {
                    rolloff = static_cast<double>(k) * sample_rate_hz / static_cast<double>(nfft);
                    break;
                }
            }
        }
        tracks[4][fidx] = rolloff;

        double flux = 0.0;
        if (!prev_mag.empty()) {
            for (int k = 0; k < n_bins; ++k) flux += (mag[k] - prev_mag[k]) * (mag[k] - prev_mag[k]);
            flux = std::sqrt(flux);
        }
        tracks[5][fidx] = flux;

        double entropy = 0.0;
        if (power_sum > 0.0 && n_bins > 1) {
            for (int k = 0; k < n_bins; ++k) {
                const double p = mag[k] * mag[k] / power_sum;
                if (p > 0.0) entropy -= p * std::log(p);
            }
            entropy /= std::log(static_cast<double>(n_bins));
        }
        tracks[6][fidx] = entropy;

        std::vector<double> log_mel(cfg.mel_bands);
        for (int b = 0; b < cfg.mel_bands; ++b) {
            double acc = 0.0;
            for (int k = 0; k < n_bins; ++k) acc += fb[b][k] * mag[k] * mag[k];
            log_mel[b] = std::log(acc + 1e-10);
        }
        for (int c = 0; c < cfg.mfcc_count; ++c) {
            double acc = 0.0;
            for (int b = 0; b < cfg.mel_bands; ++b) acc += dct[c][b] * log_mel[b];
            tracks[7 + c][fidx] = acc;
        }

        prev_mag = std::move(mag);
    }

    std::vector<double> out;
    out.reserve(static_cast<size_t>(cfg.vector_length()));
    for (const auto& track : tracks) {
        const auto f = functionals(track);
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

}  // namespace pcgkit
