#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "pcgkit/common.hpp"

namespace pcgkit {

/// Pointwise Shannon energy -x^2 * log10(x^2), with E(0) = 0 (the limit value).
inline double shannon_energy(double x) {
    const double x2 = x * x;
    if (x2 == 0.0) return 0.0;
    return -x2 * std::log10(x2);
}

inline Signal shannon_energy(const Signal& x) {
    Signal e(x.size());
    for (size_t i = 0; i < x.size(); ++i) e[i] = shannon_energy(x[i]);
    return e;
}

/// Normalized Shannon-energy envelope: values in [0, 1], peak at 1 unless the
/// input is all zero.
struct Envelope {
    Signal values;
    int window_len = 100;
    int sample_rate_hz = 0;
};

/// Centred moving average of the Shannon energy (window shrinks at the edges),
/// then divided by the global maximum.
inline Envelope envelope(const Signal& x, int sample_rate_hz, int window = 100) {
    if (window < 1) throw Error("envelope: window must be >= 1");
    if (static_cast<int>(x.size()) < window) throw Error("envelope: signal shorter than window");

    const Signal e = shannon_energy(x);
    const int n = static_cast<int>(e.size());
    const int left = window / 2;
    const int right = window - left - 1;

    // prefix sums make the moving average O(n)
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + e[i];

    Envelope env;
    env.window_len = window;
    env.sample_rate_hz = sample_rate_hz;
    env.values.resize(n);
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i - left);
        const int b = std::min(n - 1, i + right);
        env.values[i] = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
    }

    const double peak = *std::max_element(env.values.begin(), env.values.end());
    if (peak > 0.0)
        for (auto& v : env.values) v /= peak;
    return env;
}

/// Detected envelope peaks: indices strictly increasing, consecutive gaps
/// >= min_distance, heights >= min_height.
struct PeakSet {
    std::vector<int> indices;
    std::vector<double> heights;
    int min_distance = 400;
    double min_height = 0.08;
    int sample_rate_hz = 0;
};

/// Local maxima (plateaus resolve to their leftmost sample; endpoints are not
/// peaks) at or above min_height, then greedy suppression from the tallest
/// candidate down: anything within min_distance of an accepted peak is dropped.
inline PeakSet find_peaks(const Envelope& env, double min_height = 0.08, int min_distance = 400) {
    const auto& v = env.values;
    const int n = static_cast<int>(v.size());

    std::vector<int> candidates;
    int i = 1;
    while (i < n - 1) {
        if (v[i] > v[i - 1]) {
            int j = i;
            while (j + 1 < n && v[j + 1] == v[i]) ++j;  // walk the plateau
            if (j + 1 < n && v[j + 1] < v[i]) {
                if (v[i] >= min_height) candidates.push_back(i);
                i = j + 1;
                continue;
            }
            i = j + 1;
        } else {
            ++i;
        }
    }

    // tallest first; ties resolve to the earlier index so the result is
    // independent of candidate enumeration order
    std::vector<int> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[candidates[a]] != v[candidates[b]]) return v[candidates[a]] > v[candidates[b]];
        return candidates[a] < candidates[b];
    });

    std::vector<int> accepted;
    for (int oi : order) {
        const int idx = candidates[oi];
        bool ok = true;
        for (int a : accepted)
            if (std::abs(a - idx) < min_distance) {
                ok = false;
                break;
            }
        if (ok) accepted.push_back(idx);
    }
    std::sort(accepted.begin(), accepted.end());

    PeakSet p;
    p.min_distance = min_distance;
    p.min_height = min_height;
    p.sample_rate_hz = env.sample_rate_hz;
    p.indices = std::move(accepted);
    p.heights.reserve(p.indices.size());
    for (int idx : p.indices) p.heights.push_back(v[idx]);
    return p;
}

/// The 13 peak-statistics features, in order: the two largest and two smallest
/// peak-to-peak distances, their mean and (population) standard deviation; the
/// same six statistics of the peak times; and the peak count. Distances and
/// times are in seconds. Fewer than two peaks leaves all distance features 0;
/// fewer than four values repeats the extremes.
struct PeakFeatureVector {
    double d_max1 = 0, d_max2 = 0, d_min1 = 0, d_min2 = 0, d_mean = 0, d_std = 0;
    double t_max1 = 0, t_max2 = 0, t_min1 = 0, t_min2 = 0, t_mean = 0, t_std = 0;
    double peak_count = 0;

    std::array<double, 13> as_array() const {
        return {d_max1, d_max2, d_min1, d_min2, d_mean, d_std,
                t_max1, t_max2, t_min1, t_min2, t_mean, t_std, peak_count};
    }
    static const std::array<const char*, 13>& names() {
        static const std::array<const char*, 13> n = {
            "peak_dist_max1", "peak_dist_max2", "peak_dist_min1", "peak_dist_min2",
            "peak_dist_mean", "peak_dist_std",  "peak_time_max1", "peak_time_max2",
            "peak_time_min1", "peak_time_min2", "peak_time_mean", "peak_time_std",
            "peak_count"};
        return n;
    }
};

namespace detail {

// [max1, max2, min1, min2, mean, std] with extremes repeated when n < 4
inline std::array<double, 6> extremes_mean_std(const std::vector<double>& v) {
    if (v.empty()) return {0, 0, 0, 0, 0, 0};
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const size_t n = s.size();
    const double max1 = s[n - 1];
    const double max2 = n >= 2 ? s[n - 2] : s[n - 1];
    const double min1 = s[0];
    const double min2 = n >= 2 ? s[1] : s[0];
    return {max1, max2, min1, min2, mean(v), stddev_pop(v)};
}

}  // namespace detail

inline PeakFeatureVector peak_features(const PeakSet& p, int sample_rate_hz) {
    if (sample_rate_hz <= 0) throw Error("peak_features: sample rate must be positive");
    PeakFeatureVector f;
    f.peak_count = static_cast<double>(p.indices.size());
    if (p.indices.empty()) return f;

    std::vector<double> times(p.indices.size());
    for (size_t i = 0; i < p.indices.size(); ++i)
        times[i] = static_cast<double>(p.indices[i]) / sample_rate_hz;

    std::vector<double> dists;
    for (size_t i = 1; i < times.size(); ++i) dists.push_back(times[i] - times[i - 1]);

    const auto d = detail::extremes_mean_std(dists);
    f.d_max1 = d[0]; f.d_max2 = d[1]; f.d_min1 = d[2]; f.d_min2 = d[3]; f.d_mean = d[4]; f.d_std = d[5];
    const auto t = detail::extremes_mean_std(times);
    f.t_max1 = t[0]; f.t_max2 = t[1]; f.t_min1 = t[2]; f.t_min2 = t[3]; f.t_mean = t[4]; f.t_std = t[5];
    return f;
}

}  // namespace pcgkit
