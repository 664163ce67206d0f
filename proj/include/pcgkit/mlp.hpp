#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"
#include "pcgkit/rng.hpp"

#include "json.hpp"

namespace pcgkit {

/// Feed-forward classifier: ReLU hidden layers, softmax output. The default
/// architecture is the 512/512/256/256/128/128 chain with dropout 0.2 on the
/// first hidden layer and 0.5 on the rest (training only, inverted scaling).
struct MlpModel {
    std::vector<int> widths;  // [input, hidden..., n_classes]
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    std::vector<double> dropout;  // one rate per hidden layer
    std::vector<std::string> classes;
    std::uint64_t seed = 0;
    std::uint64_t feature_config_hash = 0;
    std::uint64_t reduction_model_hash = 0;

    int n_layers() const { return static_cast<int>(weights.size()); }
    int input_dim() const { return widths.front(); }
    int n_classes() const { return widths.back(); }
};

struct MlpTrainConfig {
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    bool dropout_enabled = true;
    std::uint64_t seed = 0;
};

/// He-scaled normal weights, zero biases; deterministic for a given seed.
inline MlpModel mlp_init_custom(const std::vector<int>& widths, const std::vector<double>& dropout,
                                std::uint64_t seed) {
    if (widths.size() < 2) throw Error("mlp_init: need at least input and output widths");
    for (int w : widths)
        if (w <= 0) throw Error("mlp_init: widths must be positive");
    if (dropout.size() != widths.size() - 2)
        throw Error("mlp_init: one dropout rate per hidden layer expected");

    MlpModel m;
    m.widths = widths;
    m.dropout = dropout;
    m.seed = seed;
    Rng rng(seed);
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i)
            for (int j = 0; j < fan_in; ++j) w(i, j) = rng.normal(0.0, sd);
        m.weights.push_back(std::move(w));
        m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return m;
}

inline MlpModel mlp_init(int input_dim, int n_classes, std::uint64_t seed) {
    return mlp_init_custom({input_dim, 512, 512, 256, 256, 128, 128, n_classes},
                           {0.2, 0.5, 0.5, 0.5, 0.5, 0.5}, seed);
}

namespace detail {

inline Eigen::MatrixXd softmax_columns(Eigen::MatrixXd z) {
    for (int c = 0; c < z.cols(); ++c) {
        Eigen::VectorXd col = z.col(c);
        const double mx = col.maxCoeff();
        col = (col.array() - mx).exp();
        z.col(c) = col / col.sum();
    }
    return z;
}

struct ForwardPass {
    std::vector<Eigen::MatrixXd> activations;  // a[0] = input, a[L] = probabilities
    std::vector<Eigen::MatrixXd> pre_acts;     // z per layer
    std::vector<Eigen::MatrixXd> masks;        // dropout masks actually applied
};

inline ForwardPass forward(const MlpModel& m, const Eigen::MatrixXd& x, bool train_mode,
                           Rng* rng, bool dropout_enabled) {
    ForwardPass fp;
    fp.activations.push_back(x);
    const int L = m.n_layers();
    for (int l = 0; l < L; ++l) {
        Eigen::MatrixXd z = m.weights[l] * fp.activations.back();
        z.colwise() += m.biases[l];
        fp.pre_acts.push_back(z);
        if (l + 1 < L) {
            Eigen::MatrixXd a = z.cwiseMax(0.0);
            if (train_mode && dropout_enabled && m.dropout[l] > 0.0) {
                const double keep = 1.0 - m.dropout[l];
                Eigen::MatrixXd mask(a.rows(), a.cols());
                for (int c = 0; c < a.cols(); ++c)
                    for (int r = 0; r < a.rows(); ++r)
                        mask(r, c) = (rng->uniform() < keep) ? 1.0 / keep : 0.0;
                a = a.cwiseProduct(mask);
                fp.masks.push_back(std::move(mask));
            } else {
                fp.masks.emplace_back();
            }
            fp.activations.push_back(std::move(a));
        } else {
            fp.activations.push_back(softmax_columns(z));
        }
    }
    return fp;
}

inline double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& y) {
    double loss = 0.0;
    for (int c = 0; c < probs.cols(); ++c)
        loss -= std::log(std::max(probs(y[static_cast<size_t>(c)], c), 1e-300));
    return loss / static_cast<double>(probs.cols());
}

// Backprop of mean cross-entropy; fills per-layer gradients.
inline void backward(const MlpModel& m, const ForwardPass& fp, const std::vector<int>& y,
                     std::vector<Eigen::MatrixXd>& grad_w, std::vector<Eigen::VectorXd>& grad_b) {
    const int L = m.n_layers();
    const int batch = static_cast<int>(fp.activations[0].cols());
    grad_w.assign(L, {});
    grad_b.assign(L, {});

    Eigen::MatrixXd delta = fp.activations.back();
    for (int c = 0; c < batch; ++c) delta(y[static_cast<size_t>(c)], c) -= 1.0;
    delta /= static_cast<double>(batch);

    for (int l = L - 1; l >= 0; --l) {
        grad_w[l] = delta * fp.activations[l].transpose();
        grad_b[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd da = m.weights[l].transpose() * delta;
            if (fp.masks[l - 1].size() > 0) da = da.cwiseProduct(fp.masks[l - 1]);
            delta = da.cwiseProduct(
                (fp.pre_acts[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
}

}  // namespace detail

/// Mean cross-entropy on a full batch with dropout off.
inline double mlp_loss(const MlpModel& m, const std::vector<std::vector<double>>& X,
                       const std::vector<int>& y) {
    const int n = static_cast<int>(X.size());
    Eigen::MatrixXd xb(m.input_dim(), n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m.input_dim(); ++j) xb(j, i) = X[static_cast<size_t>(i)][static_cast<size_t>(j)];
    const auto fp = detail::forward(m, xb, false, nullptr, false);
    return detail::cross_entropy(fp.activations.back(), y);
}

/// Analytic gradients of the same loss (dropout off, full batch); the shapes
/// mirror weights/biases. Used by the finite-difference checks.
inline void mlp_gradients(const MlpModel& m, const std::vector<std::vector<double>>& X,
                          const std::vector<int>& y, std::vector<Eigen::MatrixXd>& grad_w,
                          std::vector<Eigen::VectorXd>& grad_b) {
    const int n = static_cast<int>(X.size());
    Eigen::MatrixXd xb(m.input_dim(), n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m.input_dim(); ++j) xb(j, i) = X[static_cast<size_t>(i)][static_cast<size_t>(j)];
    const auto fp = detail::forward(m, xb, false, nullptr, false);
    detail::backward(m, fp, y, grad_w, grad_b);
}

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> epoch_losses;  // full-set loss (dropout off) after each epoch
};

/// Seeded mini-batch Adam on softmax cross-entropy. Single-threaded and
/// bit-reproducible for a fixed seed. Aborts on a non-finite loss.
inline MlpTrainResult mlp_train(MlpModel m, const std::vector<std::vector<double>>& X,
                                const std::vector<int>& y, const MlpTrainConfig& cfg) {
    const int n = static_cast<int>(X.size());
    if (n == 0 || X.size() != y.size()) throw Error("mlp_train: bad shapes");
    if (cfg.epochs <= 0 || cfg.batch_size < 1) throw Error("mlp_train: bad train config");
    for (const auto& row : X)
        if (static_cast<int>(row.size()) != m.input_dim())
            throw Error("mlp_train: dimension mismatch");
    for (int label : y)
        if (label < 0 || label >= m.n_classes()) throw Error("mlp_train: label out of range");

    const int L = m.n_layers();
    std::vector<Eigen::MatrixXd> mw(L), vw(L);
    std::vector<Eigen::VectorXd> mb(L), vb(L);
    for (int l = 0; l < L; ++l) {
        mw[l] = Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols());
        vw[l] = mw[l];
        mb[l] = Eigen::VectorXd::Zero(m.biases[l].size());
        vb[l] = mb[l];
    }

    Rng rng(cfg.seed);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    MlpTrainResult result;
    long t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int bs = std::min(cfg.batch_size, n - start);
            Eigen::MatrixXd xb(m.input_dim(), bs);
            std::vector<int> yb(static_cast<size_t>(bs));
            for (int c = 0; c < bs; ++c) {
                const int i = order[static_cast<size_t>(start + c)];
                for (int j = 0; j < m.input_dim(); ++j)
                    xb(j, c) = X[static_cast<size_t>(i)][static_cast<size_t>(j)];
                yb[static_cast<size_t>(c)] = y[static_cast<size_t>(i)];
            }

            const auto fp = detail::forward(m, xb, true, &rng, cfg.dropout_enabled);
            const double batch_loss = detail::cross_entropy(fp.activations.back(), yb);
            if (!std::isfinite(batch_loss))
                throw Error("mlp_train: non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch offset " + std::to_string(start));

            std::vector<Eigen::MatrixXd> gw;
            std::vector<Eigen::VectorXd> gb;
            detail::backward(m, fp, yb, gw, gb);

            ++t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
            for (int l = 0; l < L; ++l) {
                mw[l] = cfg.beta1 * mw[l] + (1.0 - cfg.beta1) * gw[l];
                vw[l] = cfg.beta2 * vw[l] + (1.0 - cfg.beta2) * gw[l].cwiseProduct(gw[l]);
                m.weights[l] -= cfg.learning_rate *
                                (mw[l] / bc1)
                                    .cwiseQuotient(((vw[l] / bc2).cwiseSqrt().array() + cfg.epsilon)
                                                       .matrix());
                mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * gb[l];
                vb[l] = cfg.beta2 * vb[l] + (1.0 - cfg.beta2) * gb[l].cwiseProduct(gb[l]);
                m.biases[l] -= cfg.learning_rate *
                               (mb[l] / bc1)
                                   .cwiseQuotient(((vb[l] / bc2).cwiseSqrt().array() + cfg.epsilon)
                                                      .matrix());
            }
        }
        result.epoch_losses.push_back(mlp_loss(m, X, y));
    }
    result.model = std::move(m);
    return result;
}

/// Forward pass without dropout; probabilities sum to 1.
inline std::vector<double> mlp_predict(const MlpModel& m, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m.input_dim()) throw Error("mlp_predict: dimension mismatch");
    Eigen::MatrixXd xb(m.input_dim(), 1);
    for (int j = 0; j < m.input_dim(); ++j) xb(j, 0) = x[static_cast<size_t>(j)];
    const auto fp = detail::forward(m, xb, false, nullptr, false);
    const Eigen::MatrixXd& probs = fp.activations.back();
    std::vector<double> out(static_cast<size_t>(probs.rows()));
    for (int i = 0; i < probs.rows(); ++i) out[static_cast<size_t>(i)] = probs(i, 0);
    return out;
}

inline int mlp_predict_class(const MlpModel& m, const std::vector<double>& x) {
    const auto p = mlp_predict(m, x);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

inline nlohmann::json to_json(const MlpModel& m) {
    nlohmann::json j;
    j["format"] = "pcgkit-mlp";
    j["version"] = 1;
    j["widths"] = m.widths;
    j["dropout"] = m.dropout;
    j["classes"] = m.classes;
    j["seed"] = m.seed;
    j["feature_config_hash"] = hash_hex(m.feature_config_hash);
    j["reduction_model_hash"] = hash_hex(m.reduction_model_hash);
    j["weights"] = nlohmann::json::array();
    j["biases"] = nlohmann::json::array();
    for (size_t l = 0; l < m.weights.size(); ++l) {
        nlohmann::json w = nlohmann::json::array();
        for (int r = 0; r < m.weights[l].rows(); ++r)
            for (int c = 0; c < m.weights[l].cols(); ++c) w.push_back(m.weights[l](r, c));
        j["weights"].push_back(std::move(w));
        nlohmann::json b = nlohmann::json::array();
        for (int r = 0; r < m.biases[l].size(); ++r) b.push_back(m.biases[l](r));
        j["biases"].push_back(std::move(b));
    }
    return j;
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "pcgkit-mlp") throw Error("not an MLP model file");
    MlpModel m;
    m.widths = j.at("widths").get<std::vector<int>>();
    m.dropout = j.at("dropout").get<std::vector<double>>();
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.feature_config_hash = std::stoull(j.at("feature_config_hash").get<std::string>(), nullptr, 16);
    m.reduction_model_hash =
        std::stoull(j.at("reduction_model_hash").get<std::string>(), nullptr, 16);
    const auto& jw = j.at("weights");
    const auto& jb = j.at("biases");
    for (size_t l = 0; l + 1 < m.widths.size(); ++l) {
        const int rows = m.widths[l + 1], cols = m.widths[l];
        const auto wf = jw.at(l).get<std::vector<double>>();
        if (static_cast<int>(wf.size()) != rows * cols) throw Error("mlp model: weight size mismatch");
        Eigen::MatrixXd w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = wf[static_cast<size_t>(r) * cols + c];
        m.weights.push_back(std::move(w));
        const auto bf = jb.at(l).get<std::vector<double>>();
        if (static_cast<int>(bf.size()) != rows) throw Error("mlp model: bias size mismatch");
        Eigen::VectorXd b(rows);
        for (int r = 0; r < rows; ++r) b(r) = bf[static_cast<size_t>(r)];
        m.biases.push_back(std::move(b));
    }
    return m;
}

}  // namespace pcgkit
