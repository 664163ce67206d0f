#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "pcgkit/common.hpp"

#include "json.hpp"

namespace pcgkit {

/// Per-column mean removal and unit-variance scaling (population std).
/// Zero-variance columns get scale 1 so they pass through as zeros.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> scales;
};

inline Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw Error("fit_standardizer: need at least 2 rows");
    const size_t d = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != d) throw Error("fit_standardizer: ragged matrix");

    Standardizer s;
    s.means.assign(d, 0.0);
    s.scales.assign(d, 0.0);
    for (const auto& r : rows)
        for (size_t j = 0; j < d; ++j) s.means[j] += r[j];
    for (auto& m : s.means) m /= static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (size_t j = 0; j < d; ++j) {
            const double dev = r[j] - s.means[j];
            s.scales[j] += dev * dev;
        }
    for (auto& v : s.scales) {
        v = std::sqrt(v / static_cast<double>(rows.size()));
        if (v == 0.0) v = 1.0;
    }
    return s;
}

inline std::vector<double> apply_standardizer(const Standardizer& s, const std::vector<double>& x) {
    if (x.size() != s.means.size()) throw Error("apply_standardizer: dimension mismatch");
    std::vector<double> y(x.size());
    for (size_t j = 0; j < x.size(); ++j) y[j] = (x[j] - s.means[j]) / s.scales[j];
    return y;
}

/// Retention policy: a fixed component count (capped by rank) or the smallest
/// count reaching a cumulative explained-variance target.
struct PcaPolicy {
    int component_count = 460;
    double variance_target = 0.0;  // > 0 switches to the variance-target rule

    bool by_variance() const { return variance_target > 0.0; }
};

struct PcaModel {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;  // K x d, rows orthonormal
    std::vector<double> explained_variance_ratio;
    PcaPolicy policy;
};

/// PCA by singular value decomposition of the centred matrix. Ratios cover all
/// positive singular values; retained components follow the policy. Sign
/// convention: each component's largest-magnitude entry is positive, so
/// serialized models are platform-reproducible.
inline PcaModel fit_pca(const std::vector<std::vector<double>>& rows, const PcaPolicy& policy) {
    if (rows.empty()) throw Error("fit_pca: empty matrix");
    if (rows.size() < 2) throw Error("fit_pca: need at least 2 rows");
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows[0].size());

    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != d) throw Error("fit_pca: ragged matrix");
        for (int j = 0; j < d; ++j) X(i, j) = rows[i][j];
    }

    PcaModel m;
    m.policy = policy;
    const Eigen::RowVectorXd mu = X.colwise().mean();
    m.mean.assign(mu.data(), mu.data() + d);
    X.rowwise() -= mu;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const Eigen::MatrixXd V = svd.matrixV();

    const double tol = std::max(n, d) * std::numeric_limits<double>::epsilon() *
                       (sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    double total = 0.0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) {
            ++rank;
            total += sv(i) * sv(i);
        }
    }
    if (rank == 0) throw Error("fit_pca: zero-variance data");

    std::vector<double> ratios(rank);
    for (int i = 0; i < rank; ++i) ratios[i] = sv(i) * sv(i) / total;

    int k;
    if (policy.by_variance()) {
        double cum = 0.0;
        k = rank;
        for (int i = 0; i < rank; ++i) {
            cum += ratios[i];
            if (cum >= policy.variance_target) {
                k = i + 1;
                break;
            }
        }
    } else {
        if (policy.component_count < 1) throw Error("fit_pca: component count must be >= 1");
        k = std::min(policy.component_count, rank);
    }

    m.explained_variance_ratio.assign(ratios.begin(), ratios.begin() + k);
    m.components.resize(k, std::vector<double>(d));
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd comp = V.col(i);
        int arg = 0;
        for (int j = 1; j < d; ++j)
            if (std::abs(comp(j)) > std::abs(comp(arg))) arg = j;
        if (comp(arg) < 0.0) comp = -comp;
        for (int j = 0; j < d; ++j) m.components[i][j] = comp(j);
    }
    return m;
}

inline std::vector<double> project(const PcaModel& m, const std::vector<double>& x) {
    if (x.size() != m.mean.size()) throw Error("project: dimension mismatch");
    std::vector<double> out(m.components.size(), 0.0);
    for (size_t i = 0; i < m.components.size(); ++i) {
        double acc = 0.0;
        for (size_t j = 0; j < x.size(); ++j) acc += m.components[i][j] * (x[j] - m.mean[j]);
        out[i] = acc;
    }
    return out;
}

/// The fitted reduction stage as stored on disk: standardizer + PCA + the
/// feature-config fingerprint it was fitted against.
struct ReductionModel {
    Standardizer standardizer;
    PcaModel pca;
    std::uint64_t feature_config_hash = 0;
};

inline std::vector<double> reduce_vector(const ReductionModel& m, const std::vector<double>& x) {
    return project(m.pca, apply_standardizer(m.standardizer, x));
}

inline nlohmann::json to_json(const ReductionModel& m) {
    nlohmann::json j;
    j["format"] = "pcgkit-reduce";
    j["version"] = 1;
    j["feature_config_hash"] = hash_hex(m.feature_config_hash);
    j["means"] = m.standardizer.means;
    j["scales"] = m.standardizer.scales;
    j["pca_mean"] = m.pca.mean;
    j["explained_variance_ratio"] = m.pca.explained_variance_ratio;
    j["component_count"] = m.pca.components.size();
    j["dimension"] = m.pca.mean.size();
    nlohmann::json flat = nlohmann::json::array();
    for (const auto& row : m.pca.components)
        for (double v : row) flat.push_back(v);
    j["components_row_major"] = std::move(flat);
    if (m.pca.policy.by_variance())
        j["policy"] = {{"variance_target", m.pca.policy.variance_target}};
    else
        j["policy"] = {{"component_count", m.pca.policy.component_count}};
    return j;
}

inline ReductionModel reduction_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "pcgkit-reduce") throw Error("not a reduction model file");
    ReductionModel m;
    m.feature_config_hash = std::stoull(j.at("feature_config_hash").get<std::string>(), nullptr, 16);
    m.standardizer.means = j.at("means").get<std::vector<double>>();
    m.standardizer.scales = j.at("scales").get<std::vector<double>>();
    m.pca.mean = j.at("pca_mean").get<std::vector<double>>();
    m.pca.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
    const size_t k = j.at("component_count").get<size_t>();
    const size_t d = j.at("dimension").get<size_t>();
    const auto flat = j.at("components_row_major").get<std::vector<double>>();
    if (flat.size() != k * d) throw Error("reduction model: component size mismatch");
    m.pca.components.assign(k, std::vector<double>(d));
    for (size_t i = 0; i < k; ++i)
        for (size_t jj = 0; jj < d; ++jj) m.pca.components[i][jj] = flat[i * d + jj];
    if (j.at("policy").contains("variance_target")) {
        m.pca.policy.variance_target = j.at("policy").at("variance_target").get<double>();
        m.pca.policy.component_count = 0;
    } else {
        m.pca.policy.component_count = j.at("policy").at("component_count").get<int>();
        m.pca.policy.variance_target = 0.0;
    }
    return m;
}

inline void save_model_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
}

inline nlohmann::json load_model_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open model file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

/// Fingerprint of a serialized model, used to tie classifiers to the exact
/// reduction stage they were trained behind.
inline std::uint64_t model_content_hash(const nlohmann::json& j) { return fnv1a(j.dump()); }

}  // namespace pcgkit
