#pragma once

#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pcgkit/audio.hpp"
#include "pcgkit/common.hpp"
#include "pcgkit/config.hpp"
#include "pcgkit/denoise.hpp"
#include "pcgkit/features.hpp"
#include "pcgkit/manifest.hpp"
#include "pcgkit/metrics.hpp"
#include "pcgkit/mlp.hpp"
#include "pcgkit/reduce.hpp"
#include "pcgkit/splits.hpp"
#include "pcgkit/svm.hpp"

namespace pcgkit {

enum class ExperimentKind { exp1, exp2, exp3 };
enum class ModelKind { svm, dnn, oracle };  // oracle predicts the true label (pipeline checks)

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "exp1") return ExperimentKind::exp1;
    if (s == "exp2") return ExperimentKind::exp2;
    if (s == "exp3") return ExperimentKind::exp3;
    throw Error("unknown experiment kind: " + s);
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "svm") return ModelKind::svm;
    if (s == "dnn") return ModelKind::dnn;
    if (s == "oracle") return ModelKind::oracle;
    throw Error("unknown model kind: " + s);
}

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::exp1: return "exp1";
        case ExperimentKind::exp2: return "exp2";
        case ExperimentKind::exp3: return "exp3";
    }
    return "";
}

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::svm: return "svm";
        case ModelKind::dnn: return "dnn";
        case ModelKind::oracle: return "oracle";
    }
    return "";
}

/// Preprocess every manifest record and extract the full feature vector.
/// Per-sample work is pure, so `jobs` threads only change wall time, never
/// the output.
inline FeatureMatrix extract_corpus_features(const DatasetManifest& m, const RunConfig& cfg) {
    const PreprocessConfig pre = cfg.preprocess_config();
    const FeatureConfig fc = cfg.feature_config();

    FeatureMatrix out;
    out.column_names = full_feature_names(fc);
    out.config_hash = fc.hash();
    const size_t n = m.records.size();
    out.ids.resize(n);
    out.labels.resize(n);
    out.patient_ids.resize(n);
    out.rows.resize(n);

    std::vector<std::string> errors(n);
    auto work = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const auto& r = m.records[i];
            try {
                AudioSample s = read_wav(r.path);
                s.patient_id = r.patient_id;
                s.label = r.label;
                s.noisy = r.noisy;
                s = preprocess_pipeline(s, pre);
                out.rows[i] = extract_full_vector(s, fc);
                out.ids[i] = r.path;
                out.labels[i] = r.label;
                out.patient_ids[i] = r.patient_id;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || n < 2) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (n + jobs - 1) / static_cast<size_t>(jobs);
        for (size_t b = 0; b < n; b += chunk)
            pool.emplace_back(work, b, std::min(n, b + chunk));
        for (auto& t : pool) t.join();
    }

    for (size_t i = 0; i < n; ++i)
        if (!errors[i].empty()) throw Error("feature extraction failed for " + m.records[i].path +
                                            ": " + errors[i]);
    return out;
}

namespace detail {

// Tags a fitted object with the exact train ids it saw, so evaluating on a
// leaked id is caught at use time rather than trusted to the split code.
template <typename T>
struct FittedOn {
    T value;
    std::set<std::string> train_ids;

    void assert_disjoint(const std::vector<std::string>& test_ids) const {
        for (const auto& id : test_ids)
            if (train_ids.count(id))
                throw std::logic_error("train/test leakage: fitted object evaluated on its own "
                                       "training sample " + id);
    }
};

}  // namespace detail

/// Run one experiment end to end. exp1: manifest as tagged, three classes.
/// exp2: extrasys relabeled to normal, unlabeled records labeled via patient
/// id, stratified 5-fold, binary. exp3: same data as exp2, patient-grouped
/// 5-fold. Per fold the standardizer, PCA and classifier are fitted on the
/// train side only.
inline MetricsReport run_experiment(ExperimentKind kind, ModelKind model,
                                    const DatasetManifest& manifest, const RunConfig& cfg) {
    DatasetManifest m = manifest;
    SplitPlan plan;
    std::vector<std::string> classes;
    int epochs = 0;

    switch (kind) {
        case ExperimentKind::exp1:
            plan = split_challenge(m);
            classes = {"normal", "murmur", "extrasys"};
            epochs = cfg.epochs_exp1;
            break;
        case ExperimentKind::exp2:
            m = label_unlabeled_by_patient(relabel_extrasys_to_normal(m));
            plan = stratified_kfold(m, 5, cfg.seed);
            classes = {"normal", "murmur"};
            epochs = cfg.epochs_exp2;
            break;
        case ExperimentKind::exp3:
            m = label_unlabeled_by_patient(relabel_extrasys_to_normal(m));
            plan = grouped_kfold(m, 5, cfg.seed);
            classes = {"normal", "murmur"};
            epochs = cfg.epochs_exp3;
            break;
    }

    const FeatureMatrix feats = extract_corpus_features(m, cfg);
    std::map<std::string, size_t> row_of;
    for (size_t i = 0; i < feats.ids.size(); ++i) row_of[feats.ids[i]] = i;
    std::map<std::string, int> class_index;
    for (size_t c = 0; c < classes.size(); ++c) class_index[classes[c]] = static_cast<int>(c);

    auto label_of = [&](size_t row) {
        const auto it = class_index.find(to_string(feats.labels[row]));
        if (it == class_index.end())
            throw Error("label '" + to_string(feats.labels[row]) + "' not in this experiment's classes");
        return it->second;
    };

    MetricsReport rep;
    rep.kind = to_string(kind);
    rep.model = to_string(model);
    rep.seed = cfg.seed;
    rep.classes = classes;
    if (kind == ExperimentKind::exp1 && plan.challenge_patient_overlap > 0)
        rep.flags.push_back("challenge_patient_overlap_count:" +
                            std::to_string(plan.challenge_patient_overlap));

    for (size_t fold_idx = 0; fold_idx < plan.folds.size(); ++fold_idx) {
        const Fold& fold = plan.folds[fold_idx];

        std::vector<std::vector<double>> x_train;
        std::vector<int> y_train;
        for (const auto& id : fold.train_ids) {
            const size_t row = row_of.at(id);
            x_train.push_back(feats.rows[row]);
            y_train.push_back(label_of(row));
        }

        detail::FittedOn<Standardizer> standardizer;
        standardizer.value = fit_standardizer(x_train);
        standardizer.train_ids.insert(fold.train_ids.begin(), fold.train_ids.end());
        for (auto& row : x_train) row = apply_standardizer(standardizer.value, row);

        detail::FittedOn<PcaModel> pca;
        pca.value = fit_pca(x_train, cfg.pca_policy());
        pca.train_ids = standardizer.train_ids;
        for (auto& row : x_train) row = project(pca.value, row);

        standardizer.assert_disjoint(fold.test_ids);
        pca.assert_disjoint(fold.test_ids);

        const std::uint64_t fold_seed = cfg.seed + fold_idx;
        SvmModel svm;
        MlpModel mlp;
        if (model == ModelKind::svm) {
            SvmParams sp = cfg.svm_params();
            sp.seed = fold_seed;
            svm = svm_train(x_train, y_train, classes, sp);
        } else if (model == ModelKind::dnn) {
            MlpTrainConfig tc = cfg.mlp_train_config(epochs);
            tc.seed = fold_seed;
            MlpModel init = mlp_init(static_cast<int>(x_train[0].size()),
                                     static_cast<int>(classes.size()), fold_seed);
            init.classes = classes;
            mlp = mlp_train(std::move(init), x_train, y_train, tc).model;
        }

        std::vector<int> truth, predicted;
        for (const auto& id : fold.test_ids) {
            const size_t row = row_of.at(id);
            truth.push_back(label_of(row));
            if (model == ModelKind::oracle) {
                predicted.push_back(label_of(row));
                continue;
            }
            std::vector<double> x =
                project(pca.value, apply_standardizer(standardizer.value, feats.rows[row]));
            if (model == ModelKind::svm)
                predicted.push_back(svm_predict(svm, x));
            else
                predicted.push_back(mlp_predict_class(mlp, x));
        }

        rep.folds.push_back(metrics_row(confusion(truth, predicted, classes)));
    }

    finalize_report(rep);
    return rep;
}

}  // namespace pcgkit
