#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"

namespace pcgkit {

enum class SplitTag { train, test, unassigned };

inline std::string to_string(SplitTag t) {
    switch (t) {
        case SplitTag::train: return "train";
        case SplitTag::test: return "test";
        case SplitTag::unassigned: return "";
    }
    return "";
}

inline SplitTag split_tag_from_string(const std::string& s) {
    if (s == "train") return SplitTag::train;
    if (s == "test") return SplitTag::test;
    if (s.empty()) return SplitTag::unassigned;
    throw Error("unknown split tag: '" + s + "'");
}

struct ManifestRecord {
    std::string path;
    Label label = Label::unlabeled;
    std::string patient_id;
    SplitTag split = SplitTag::unassigned;
    bool noisy = false;
};

/// Corpus index. Record paths double as sample ids and must be unique.
struct DatasetManifest {
    std::vector<ManifestRecord> records;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline bool parse_noisy(const std::string& s, const std::string& context) {
    if (s == "0" || s == "false" || s.empty()) return false;
    if (s == "1" || s == "true") return true;
    throw Error("bad noisy flag '" + s + "' in " + context);
}

}  // namespace detail

// Manifest CSV: header `path,label,patient_id,split,noisy`, one record per row.
// Empty label means unlabeled, empty split means unassigned.
inline DatasetManifest parse_manifest_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw Error("empty manifest: " + name);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "path,label,patient_id,split,noisy")
        throw Error("bad manifest header in " + name + ": '" + line + "'");

    DatasetManifest m;
    std::set<std::string> seen;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 5)
            throw Error("malformed manifest row at " + name + ":" + std::to_string(lineno));
        ManifestRecord r;
        r.path = fields[0];
        if (r.path.empty())
            throw Error("empty path at " + name + ":" + std::to_string(lineno));
        r.label = label_from_string(fields[1]);
        r.patient_id = fields[2];
        r.split = split_tag_from_string(fields[3]);
        r.noisy = detail::parse_noisy(fields[4], name + ":" + std::to_string(lineno));
        if (!seen.insert(r.path).second) throw Error("duplicate path in manifest: " + r.path);
        m.records.push_back(std::move(r));
    }
    return m;
}

inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open manifest: " + path);
    return parse_manifest_csv(f, path);
}

inline void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path);
    f << "path,label,patient_id,split,noisy\n";
    for (const auto& r : m.records)
        f << r.path << ',' << to_string(r.label) << ',' << r.patient_id << ','
          << to_string(r.split) << ',' << (r.noisy ? '1' : '0') << '\n';
}

/// Turn every extrasys record into normal; everything else untouched. Idempotent.
inline DatasetManifest relabel_extrasys_to_normal(DatasetManifest m) {
    for (auto& r : m.records)
        if (r.label == Label::extrasys) r.label = Label::normal;
    return m;
}

/// Give each unlabeled record the unique label of its patient's labeled records.
/// A patient with no labeled record, or with conflicting labels, is a hard error:
/// the one-label-per-patient assumption has to be surfaced, not papered over.
inline DatasetManifest label_unlabeled_by_patient(DatasetManifest m) {
    std::map<std::string, std::set<Label>> patient_labels;
    for (const auto& r : m.records)
        if (r.label != Label::unlabeled) patient_labels[r.patient_id].insert(r.label);

    for (auto& r : m.records) {
        if (r.label != Label::unlabeled) continue;
        if (r.patient_id.empty())
            throw Error("unlabeled record without patient id: " + r.path);
        auto it = patient_labels.find(r.patient_id);
        if (it == patient_labels.end() || it->second.empty())
            throw Error("no labeled record for patient: " + r.patient_id);
        if (it->second.size() > 1)
            throw Error("conflicting labels: " + r.patient_id);
        r.label = *it->second.begin();
    }
    return m;
}

}  // namespace pcgkit
