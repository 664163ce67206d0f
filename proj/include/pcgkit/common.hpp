#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcgkit {

using Signal = std::vector<double>;

/// Data or I/O problem: bad file, malformed manifest, inconsistent model.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user-supplied configuration (unknown key, value out of range).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

enum class Label { normal, murmur, extrasys, unlabeled };

inline std::string to_string(Label l) {
    switch (l) {
        case Label::normal: return "normal";
        case Label::murmur: return "murmur";
        case Label::extrasys: return "extrasys";
        case Label::unlabeled: return "";
    }
    return "";
}

inline Label label_from_string(const std::string& s) {
    if (s == "normal") return Label::normal;
    if (s == "murmur") return Label::murmur;
    if (s == "extrasys") return Label::extrasys;
    if (s.empty()) return Label::unlabeled;
    throw Error("unknown label: '" + s + "'");
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Population standard deviation (well-defined at n = 1).
inline double stddev_pop(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

inline double rms(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Median; even-length input averages the two middle values.
inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + n / 2);
    return 0.5 * (lo + hi);
}

/// FNV-1a over a byte string; used to fingerprint configs and model files.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace pcgkit
