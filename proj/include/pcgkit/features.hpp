#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pcgkit/acoustic.hpp"
#include "pcgkit/audio.hpp"
#include "pcgkit/common.hpp"
#include "pcgkit/envelope.hpp"

namespace pcgkit {

struct PeakConfig {
    int envelope_window = 100;
    double min_height = 0.08;
    int min_distance = 400;

    std::string canonical_string() const {
        std::ostringstream os;
        os << "peaks{window=" << envelope_window << ",height=" << min_height
           << ",distance=" << min_distance << "}";
        return os.str();
    }
};

struct FeatureConfig {
    AcousticConfig acoustic;
    PeakConfig peaks;

    int vector_length() const { return acoustic.vector_length() + 13; }
    std::uint64_t hash() const {
        return fnv1a(acoustic.canonical_string() + "|" + peaks.canonical_string());
    }
};

inline std::vector<std::string> full_feature_names(const FeatureConfig& cfg) {
    std::vector<std::string> names = acoustic_feature_names(cfg.acoustic);
    for (const char* n : PeakFeatureVector::names()) names.emplace_back(n);
    return names;
}

/// Acoustic bank first, the 13 peak features appended. The sample is expected
/// to be preprocessed already.
inline std::vector<double> extract_full_vector(const AudioSample& s, const FeatureConfig& cfg = {}) {
    std::vector<double> v = acoustic_features(s.samples, s.sample_rate_hz, cfg.acoustic);
    const Envelope env = envelope(s.samples, s.sample_rate_hz, cfg.peaks.envelope_window);
    const PeakSet peaks = find_peaks(env, cfg.peaks.min_height, cfg.peaks.min_distance);
    const auto pf = peak_features(peaks, s.sample_rate_hz).as_array();
    v.insert(v.end(), pf.begin(), pf.end());
    return v;
}

/// Rows of feature vectors aligned with ids/labels/patients.
struct FeatureMatrix {
    std::vector<std::string> ids;
    std::vector<Label> labels;
    std::vector<std::string> patient_ids;
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> rows;
    std::uint64_t config_hash = 0;
};

inline void save_features_csv(const FeatureMatrix& m, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path);
    f << "# config_hash=" << hash_hex(m.config_hash) << "\n";
    f << "id,label,patient_id";
    for (const auto& c : m.column_names) f << ',' << c;
    f << '\n';
    f.precision(17);
    for (size_t i = 0; i < m.rows.size(); ++i) {
        f << m.ids[i] << ',' << to_string(m.labels[i]) << ',' << m.patient_ids[i];
        for (double v : m.rows[i]) f << ',' << v;
        f << '\n';
    }
}

inline FeatureMatrix load_features_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open features file: " + path);
    FeatureMatrix m;
    std::string line;
    // optional hash comment lines, then the header
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# config_hash=", 0) == 0) {
            m.config_hash = std::stoull(line.substr(14), nullptr, 16);
            continue;
        }
        break;
    }
    std::istringstream header(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(header, col, ',')) cols.push_back(col);
    if (cols.size() < 4 || cols[0] != "id" || cols[1] != "label" || cols[2] != "patient_id")
        throw Error("bad features header in " + path);
    m.column_names.assign(cols.begin() + 3, cols.end());

    size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != cols.size())
            throw Error("malformed features row at " + path + ":" + std::to_string(lineno));
        m.ids.push_back(fields[0]);
        m.labels.push_back(label_from_string(fields[1]));
        m.patient_ids.push_back(fields[2]);
        std::vector<double> values(fields.size() - 3);
        for (size_t i = 3; i < fields.size(); ++i) values[i - 3] = std::stod(fields[i]);
        m.rows.push_back(std::move(values));
    }
    return m;
}

/// Per-sample envelope/peak debug dump: index, envelope value, is_peak.
inline void dump_envelope_csv(const AudioSample& s, const PeakConfig& cfg, const std::string& path) {
    const Envelope env = envelope(s.samples, s.sample_rate_hz, cfg.envelope_window);
    const PeakSet peaks = find_peaks(env, cfg.min_height, cfg.min_distance);
    std::vector<char> is_peak(env.values.size(), 0);
    for (int idx : peaks.indices) is_peak[static_cast<size_t>(idx)] = 1;

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path);
    f << "index,envelope,is_peak\n";
    f.precision(17);
    for (size_t i = 0; i < env.values.size(); ++i)
        f << i << ',' << env.values[i] << ',' << static_cast<int>(is_peak[i]) << '\n';
}

}  // namespace pcgkit
