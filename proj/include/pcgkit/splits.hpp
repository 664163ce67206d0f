#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"
#include "pcgkit/manifest.hpp"
#include "pcgkit/rng.hpp"

namespace pcgkit {

enum class SplitKind { challenge, stratified_kfold, grouped_kfold };

struct Fold {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

struct SplitPlan {
    std::vector<Fold> folds;
    SplitKind kind = SplitKind::challenge;
    std::uint64_t seed = 0;
    int challenge_patient_overlap = 0;  // warning count, challenge split only
};

/// Single fold straight from the manifest's split tags. Patient overlap across
/// the two sides is permitted but counted.
inline SplitPlan split_challenge(const DatasetManifest& m) {
    SplitPlan plan;
    plan.kind = SplitKind::challenge;
    Fold fold;
    std::set<std::string> train_patients, test_patients;
    for (const auto& r : m.records) {
        if (r.split == SplitTag::train) {
            fold.train_ids.push_back(r.path);
            train_patients.insert(r.patient_id);
        } else if (r.split == SplitTag::test) {
            fold.test_ids.push_back(r.path);
            test_patients.insert(r.patient_id);
        } else {
            throw Error("split_challenge: record without split tag: " + r.path);
        }
    }
    if (fold.train_ids.empty() || fold.test_ids.empty())
        throw Error("split_challenge: both train and test records required");
    for (const auto& p : test_patients)
        if (!p.empty() && train_patients.count(p)) ++plan.challenge_patient_overlap;
    plan.folds.push_back(std::move(fold));
    return plan;
}

/// Class-stratified k folds: per-class seeded shuffle, then round-robin, so the
/// fold class counts stay within one sample of proportional.
inline SplitPlan stratified_kfold(const DatasetManifest& m, int k, std::uint64_t seed) {
    if (k < 2) throw Error("stratified_kfold: k must be >= 2");
    std::map<Label, std::vector<std::string>> by_class;
    for (const auto& r : m.records) {
        if (r.label == Label::unlabeled)
            throw Error("stratified_kfold: unlabeled record: " + r.path);
        by_class[r.label].push_back(r.path);
    }
    for (const auto& [label, ids] : by_class)
        if (static_cast<int>(ids.size()) < k)
            throw Error("stratified_kfold: class '" + to_string(label) + "' has fewer than k samples");

    Rng rng(seed);
    std::vector<std::vector<std::string>> fold_test(static_cast<size_t>(k));
    for (auto& [label, ids] : by_class) {
        rng.shuffle(ids);
        for (size_t i = 0; i < ids.size(); ++i) fold_test[i % static_cast<size_t>(k)].push_back(ids[i]);
    }

    SplitPlan plan;
    plan.kind = SplitKind::stratified_kfold;
    plan.seed = seed;
    for (int f = 0; f < k; ++f) {
        Fold fold;
        fold.test_ids = fold_test[static_cast<size_t>(f)];
        std::set<std::string> test_set(fold.test_ids.begin(), fold.test_ids.end());
        for (const auto& r : m.records)
            if (!test_set.count(r.path)) fold.train_ids.push_back(r.path);
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

/// Patient-wise k folds: every sample of a patient rides on one side. The
/// seeded shuffle fixes tie order, then patients go largest-first to the
/// currently smallest fold (greedy size balancing by sample count).
inline SplitPlan grouped_kfold(const DatasetManifest& m, int k, std::uint64_t seed) {
    if (k < 2) throw Error("grouped_kfold: k must be >= 2");
    std::map<std::string, std::vector<std::string>> by_patient;
    for (const auto& r : m.records) {
        if (r.patient_id.empty())
            throw Error("grouped_kfold: record without patient id: " + r.path);
        by_patient[r.patient_id].push_back(r.path);
    }
    if (static_cast<int>(by_patient.size()) < k)
        throw Error("grouped_kfold: fewer distinct patients than folds");

    std::vector<std::string> patients;
    for (const auto& [p, ids] : by_patient) patients.push_back(p);
    Rng rng(seed);
    rng.shuffle(patients);
    std::stable_sort(patients.begin(), patients.end(), [&](const std::string& a, const std::string& b) {
        return by_patient.at(a).size() > by_patient.at(b).size();
    });

    std::vector<size_t> fold_sizes(static_cast<size_t>(k), 0);
    std::vector<std::vector<std::string>> fold_patients(static_cast<size_t>(k));
    for (const auto& p : patients) {
        size_t target = 0;
        for (size_t f = 1; f < fold_sizes.size(); ++f)
            if (fold_sizes[f] < fold_sizes[target]) target = f;
        fold_patients[target].push_back(p);
        fold_sizes[target] += by_patient.at(p).size();
    }

    SplitPlan plan;
    plan.kind = SplitKind::grouped_kfold;
    plan.seed = seed;
    for (int f = 0; f < k; ++f) {
        Fold fold;
        std::set<std::string> test_patients(fold_patients[static_cast<size_t>(f)].begin(),
                                            fold_patients[static_cast<size_t>(f)].end());
        for (const auto& r : m.records) {
            if (test_patients.count(r.patient_id))
                fold.test_ids.push_back(r.path);
            else
                fold.train_ids.push_back(r.path);
        }
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

}  // namespace pcgkit
