#pragma once

#include <string>
#include <vector>

#include "pcgkit/common.hpp"

namespace pcgkit {

/// Orthonormal Daubechies filter pair. `lowpass` is the scaling filter
/// (synthesis side); the highpass is its quadrature mirror.
struct WaveletBank {
    std::string name;
    std::vector<double> lowpass;
    std::vector<double> highpass;
};

inline WaveletBank wavelet_bank(const std::string& name) {
    WaveletBank b;
    b.name = name;
    if (name == "db1" || name == "haar") {
        b.lowpass = {0.7071067811865476, 0.7071067811865476};
    } else if (name == "db2") {
        b.lowpass = {0.48296291314469025, 0.8365163037374690, 0.22414386804185735,
                     -0.12940952255092145};
    } else if (name == "db4") {
        b.lowpass = {0.23037781330885523, 0.7148465705525415,   0.6308807679295904,
                     -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
                     0.032883011666982945, -0.010597401784997278};
    } else {
        throw Error("unsupported wavelet: " + name + " (db1, db2, db4 available)");
    }
    const size_t L = b.lowpass.size();
    b.highpass.resize(L);
    for (size_t k = 0; k < L; ++k)
        b.highpass[k] = ((k % 2 == 0) ? 1.0 : -1.0) * b.lowpass[L - 1 - k];
    return b;
}

/// Multi-level decomposition with periodic boundary handling. details[0] is the
/// finest level. Odd-length inputs at any level are extended by repeating the
/// last sample before the split; pre_extension_lengths records what to truncate
/// back to on reconstruction. When every cascade length is even the transform
/// is exactly orthogonal and the coefficient count equals original_length.
struct WaveletDecomposition {
    Signal approx;
    std::vector<Signal> details;
    std::string wavelet;
    std::string boundary_mode = "periodization";
    int original_length = 0;
    std::vector<int> pre_extension_lengths;  // input length at each level, finest first
};

namespace detail {

inline void analysis_step(const Signal& x, const WaveletBank& b, Signal& ca, Signal& cd) {
    const int n = static_cast<int>(x.size());
    const int half = n / 2;
    const int L = static_cast<int>(b.lowpass.size());
    ca.assign(half, 0.0);
    cd.assign(half, 0.0);
    for (int i = 0; i < half; ++i) {
        double a = 0.0, d = 0.0;
        for (int k = 0; k < L; ++k) {
            const double v = x[(2 * i + k) % n];
            a += b.lowpass[k] * v;
            d += b.highpass[k] * v;
        }
        ca[i] = a;
        cd[i] = d;
    }
}

inline Signal synthesis_step(const Signal& ca, const Signal& cd, const WaveletBank& b) {
    const int half = static_cast<int>(ca.size());
    const int n = 2 * half;
    const int L = static_cast<int>(b.lowpass.size());
    Signal y(n, 0.0);
    for (int i = 0; i < half; ++i) {
        for (int k = 0; k < L; ++k) {
            const int m = (2 * i + k) % n;
            y[m] += ca[i] * b.lowpass[k] + cd[i] * b.highpass[k];
        }
    }
    return y;
}

}  // namespace detail

inline WaveletDecomposition dwt(const Signal& x, const std::string& wavelet, int levels) {
    if (levels < 1) throw Error("dwt: levels must be >= 1");
    if (x.empty()) throw Error("dwt: empty signal");
    const WaveletBank bank = wavelet_bank(wavelet);
    const int taps = static_cast<int>(bank.lowpass.size());

    // the deepest level must still see at least one filter length of signal
    {
        int len = static_cast<int>(x.size());
        for (int j = 0; j < levels; ++j) {
            if (len < taps)
                throw Error("dwt: signal too short for " + std::to_string(levels) + " levels");
            if (len % 2 != 0) ++len;
            len /= 2;
        }
    }

    WaveletDecomposition d;
    d.wavelet = wavelet;
    d.original_length = static_cast<int>(x.size());
    d.details.resize(levels);

    Signal cur = x;
    for (int j = 0; j < levels; ++j) {
        d.pre_extension_lengths.push_back(static_cast<int>(cur.size()));
        if (cur.size() % 2 != 0) cur.push_back(cur.back());
        Signal ca, cd;
        detail::analysis_step(cur, bank, ca, cd);
        d.details[j] = std::move(cd);
        cur = std::move(ca);
    }
    d.approx = std::move(cur);
    return d;
}

inline Signal idwt(const WaveletDecomposition& d) {
    const int levels = static_cast<int>(d.details.size());
    if (levels < 1 || static_cast<int>(d.pre_extension_lengths.size()) != levels)
        throw Error("idwt: malformed decomposition");
    const WaveletBank bank = wavelet_bank(d.wavelet);

    Signal cur = d.approx;
    for (int j = levels - 1; j >= 0; --j) {
        if (d.details[j].size() != cur.size())
            throw Error("idwt: inconsistent coefficient lengths at level " + std::to_string(j + 1));
        cur = detail::synthesis_step(cur, d.details[j], bank);
        const int want = d.pre_extension_lengths[j];
        if (static_cast<int>(cur.size()) < want)
            throw Error("idwt: inconsistent coefficient lengths at level " + std::to_string(j + 1));
        cur.resize(want);
    }
    if (static_cast<int>(cur.size()) != d.original_length)
        throw Error("idwt: reconstruction length mismatch");
    return cur;
}

}  // namespace pcgkit
