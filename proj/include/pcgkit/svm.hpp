#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"
#include "pcgkit/rng.hpp"

#include "json.hpp"

namespace pcgkit {

struct SvmParams {
    double c = 1.0;
    double gamma = 0.0;  // <= 0 means auto: 1 / (n_features * var(X))
    double tol = 1e-3;
    int max_iter = 200000;  // budget of successful coefficient updates
    std::uint64_t seed = 0;
};

inline double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    double d2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

/// Scale-aware default: 1 / (n_features * variance of all matrix entries).
inline double svm_auto_gamma(const std::vector<std::vector<double>>& X) {
    if (X.empty() || X[0].empty()) return 1.0;
    double sum = 0.0, sq = 0.0;
    size_t count = 0;
    for (const auto& row : X)
        for (double v : row) {
            sum += v;
            sq += v * v;
            ++count;
        }
    const double m = sum / static_cast<double>(count);
    const double var = sq / static_cast<double>(count) - m * m;
    const double denom = static_cast<double>(X[0].size()) * (var > 0.0 ? var : 1.0);
    return 1.0 / denom;
}

/// Dual solution of one binary sub-problem (labels in {-1,+1}).
struct SvmBinaryResult {
    std::vector<double> alpha;  // full length-n vector, 0 <= alpha_i <= C
    double bias = 0.0;
    bool converged = false;
    int updates = 0;
};

namespace detail {

// Platt's sequential minimal optimization with an error cache and the usual
// two heuristics for the second working-set index. The scan origin of the
// fallback loops is drawn from a seeded generator, which is the only source
// of randomness.
class SmoSolver {
public:
    SmoSolver(const std::vector<std::vector<double>>& X, const std::vector<double>& y, double C,
              double gamma, double tol, int max_iter, std::uint64_t seed)
        : X_(X), y_(y), c_(C), tol_(tol), max_iter_(max_iter), rng_(seed) {
        n_ = static_cast<int>(X.size());
        gram_.assign(static_cast<size_t>(n_) * n_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                const double k = rbf_kernel(X[i], X[j], gamma);
                gram_[idx(i, j)] = k;
                gram_[idx(j, i)] = k;
            }
        alpha_.assign(n_, 0.0);
        errors_.resize(n_);
        for (int i = 0; i < n_; ++i) errors_[i] = -y_[i];  // f = 0 initially
    }

    SvmBinaryResult solve() {
        int num_changed = 0;
        bool examine_all = true;
        while (num_changed > 0 || examine_all) {
            num_changed = 0;
            for (int i = 0; i < n_; ++i) {
                if (!examine_all && (alpha_[i] <= 0.0 || alpha_[i] >= c_)) continue;
                num_changed += examine(i);
                if (updates_ >= max_iter_) break;
            }
            if (updates_ >= max_iter_) break;
            if (examine_all)
                examine_all = false;
            else if (num_changed == 0)
                examine_all = true;
        }

        SvmBinaryResult r;
        r.alpha = alpha_;
        r.bias = b_;
        r.updates = updates_;
        r.converged = updates_ < max_iter_;
        return r;
    }

private:
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * n_ + j; }
    double k(int i, int j) const { return gram_[idx(i, j)]; }

    int examine(int i2) {
        const double y2 = y_[i2];
        const double a2 = alpha_[i2];
        const double e2 = errors_[i2];
        const double r2 = e2 * y2;
        if (!((r2 < -tol_ && a2 < c_) || (r2 > tol_ && a2 > 0.0))) return 0;

        // heuristic 1: maximal |E1 - E2| among non-bound points
        int best = -1;
        double best_gap = -1.0;
        for (int i = 0; i < n_; ++i) {
            if (alpha_[i] <= 0.0 || alpha_[i] >= c_) continue;
            const double gap = std::abs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return 1;

        // heuristic 2: all non-bound, then everything, from a random origin
        const int start1 = n_ > 0 ? static_cast<int>(rng_.below(n_)) : 0;
        for (int off = 0; off < n_; ++off) {
            const int i1 = (start1 + off) % n_;
            if (alpha_[i1] <= 0.0 || alpha_[i1] >= c_) continue;
            if (take_step(i1, i2)) return 1;
        }
        const int start2 = n_ > 0 ? static_cast<int>(rng_.below(n_)) : 0;
        for (int off = 0; off < n_; ++off) {
            const int i1 = (start2 + off) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = errors_[i1], e2 = errors_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c_, c_ + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c_);
            hi = std::min(c_, a1 + a2);
        }
        if (lo >= hi) return false;

        const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // degenerate curvature: evaluate the objective at both clip ends
            const double f1 = y1 * (e1 - b_) - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * (e2 - b_) - a2 * k22 - s * a1 * k12;
            const double l1 = a1 + s * (a2 - lo);
            const double h1 = a1 + s * (a2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                                  s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                                  s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12)
                a2_new = lo;
            else if (obj_lo > obj_hi + 1e-12)
                a2_new = hi;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;

        const double a1_new = a1 + s * (a2 - a2_new);
        const double d1 = (a1_new - a1) * y1;
        const double d2 = (a2_new - a2) * y2;

        const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < c_)
            b_new = b1;
        else if (a2_new > 0.0 && a2_new < c_)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        const double db = b_new - b_;
        for (int i = 0; i < n_; ++i) errors_[i] += d1 * k(i1, i) + d2 * k(i2, i) + db;
        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        b_ = b_new;
        ++updates_;
        return true;
    }

    const std::vector<std::vector<double>>& X_;
    const std::vector<double>& y_;
    double c_, tol_;
    int max_iter_;
    Rng rng_;
    int n_ = 0;
    std::vector<double> gram_, alpha_, errors_;
    double b_ = 0.0;
    int updates_ = 0;
};

}  // namespace detail

inline SvmBinaryResult svm_train_binary(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y, const SvmParams& p) {
    if (X.size() != y.size() || X.empty()) throw Error("svm_train_binary: bad shapes");
    double gamma = p.gamma > 0.0 ? p.gamma : svm_auto_gamma(X);
    detail::SmoSolver solver(X, y, p.c, gamma, p.tol, p.max_iter, p.seed);
    return solver.solve();
}

/// One-vs-one RBF SVM. Each pair keeps only its support vectors.
struct SvmModel {
    struct Pair {
        int class_a = 0;  // +1 side, index into `classes`
        int class_b = 0;  // -1 side
        std::vector<std::vector<double>> support_vectors;
        std::vector<double> dual_coefs;  // alpha_i * y_i
        double bias = 0.0;
        bool converged = false;
    };
    std::vector<std::string> classes;
    std::vector<Pair> pairs;
    double gamma = 0.0;
    double c = 1.0;
    std::uint64_t feature_config_hash = 0;
    std::uint64_t reduction_model_hash = 0;
};

inline double svm_pair_decision(const SvmModel::Pair& pair, const std::vector<double>& x,
                                double gamma) {
    double f = pair.bias;
    for (size_t i = 0; i < pair.support_vectors.size(); ++i)
        f += pair.dual_coefs[i] * rbf_kernel(pair.support_vectors[i], x, gamma);
    return f;
}

/// Train on class indices 0..k-1 (class names supplied for serialization).
inline SvmModel svm_train(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                          const std::vector<std::string>& classes, const SvmParams& p) {
    if (X.size() != y.size() || X.empty()) throw Error("svm_train: bad shapes");
    for (const auto& row : X)
        for (double v : row)
            if (!std::isfinite(v)) throw Error("svm_train: non-finite feature value");

    std::vector<int> present;
    for (size_t c = 0; c < classes.size(); ++c)
        if (std::count(y.begin(), y.end(), static_cast<int>(c)) > 0)
            present.push_back(static_cast<int>(c));
    if (present.size() < 2) throw Error("svm_train: need samples from at least two classes");

    SvmModel m;
    m.classes = classes;
    m.c = p.c;
    m.gamma = p.gamma > 0.0 ? p.gamma : svm_auto_gamma(X);

    for (size_t a = 0; a < present.size(); ++a) {
        for (size_t b = a + 1; b < present.size(); ++b) {
            std::vector<std::vector<double>> sub_x;
            std::vector<double> sub_y;
            for (size_t i = 0; i < X.size(); ++i) {
                if (y[i] == present[a]) {
                    sub_x.push_back(X[i]);
                    sub_y.push_back(1.0);
                } else if (y[i] == present[b]) {
                    sub_x.push_back(X[i]);
                    sub_y.push_back(-1.0);
                }
            }
            SvmParams sp = p;
            sp.gamma = m.gamma;
            sp.seed = p.seed + 0x9e37ull * (a * classes.size() + b);
            const SvmBinaryResult r = svm_train_binary(sub_x, sub_y, sp);

            SvmModel::Pair pair;
            pair.class_a = present[a];
            pair.class_b = present[b];
            pair.bias = r.bias;
            pair.converged = r.converged;
            for (size_t i = 0; i < sub_x.size(); ++i)
                if (r.alpha[i] > 0.0) {
                    pair.support_vectors.push_back(sub_x[i]);
                    pair.dual_coefs.push_back(r.alpha[i] * sub_y[i]);
                }
            m.pairs.push_back(std::move(pair));
        }
    }
    return m;
}

/// One-vs-one majority vote; ties break on summed |decision value|, then on
/// class order. Also returns the per-pair decision values.
inline int svm_predict(const SvmModel& m, const std::vector<double>& x,
                       std::vector<double>* decisions = nullptr) {
    if (m.pairs.empty()) throw Error("svm_predict: empty model");
    for (const auto& pair : m.pairs)
        if (!pair.support_vectors.empty() && pair.support_vectors[0].size() != x.size())
            throw Error("svm_predict: dimension mismatch");

    std::vector<int> votes(m.classes.size(), 0);
    std::vector<double> score(m.classes.size(), 0.0);
    if (decisions) decisions->clear();
    for (const auto& pair : m.pairs) {
        const double f = svm_pair_decision(pair, x, m.gamma);
        if (decisions) decisions->push_back(f);
        const int winner = f >= 0.0 ? pair.class_a : pair.class_b;
        ++votes[winner];
        score[winner] += std::abs(f);
    }
    int best = 0;
    for (size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && score[c] > score[best])) {
            best = static_cast<int>(c);
        }
    }
    return best;
}

inline nlohmann::json to_json(const SvmModel& m) {
    nlohmann::json j;
    j["format"] = "pcgkit-svm";
    j["version"] = 1;
    j["classes"] = m.classes;
    j["gamma"] = m.gamma;
    j["c"] = m.c;
    j["feature_config_hash"] = hash_hex(m.feature_config_hash);
    j["reduction_model_hash"] = hash_hex(m.reduction_model_hash);
    j["pairs"] = nlohmann::json::array();
    for (const auto& p : m.pairs) {
        nlohmann::json pj;
        pj["class_a"] = p.class_a;
        pj["class_b"] = p.class_b;
        pj["bias"] = p.bias;
        pj["converged"] = p.converged;
        pj["dual_coefs"] = p.dual_coefs;
        pj["support_vectors"] = p.support_vectors;
        j["pairs"].push_back(std::move(pj));
    }
    return j;
}

inline SvmModel svm_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "pcgkit-svm") throw Error("not an SVM model file");
    SvmModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.gamma = j.at("gamma").get<double>();
    m.c = j.at("c").get<double>();
    m.feature_config_hash = std::stoull(j.at("feature_config_hash").get<std::string>(), nullptr, 16);
    m.reduction_model_hash =
        std::stoull(j.at("reduction_model_hash").get<std::string>(), nullptr, 16);
    for (const auto& pj : j.at("pairs")) {
        SvmModel::Pair p;
        p.class_a = pj.at("class_a").get<int>();
        p.class_b = pj.at("class_b").get<int>();
        p.bias = pj.at("bias").get<double>();
        p.converged = pj.at("converged").get<bool>();
        p.dual_coefs = pj.at("dual_coefs").get<std::vector<double>>();
        p.support_vectors = pj.at("support_vectors").get<std::vector<std::vector<double>>>();
        m.pairs.push_back(std::move(p));
    }
    return m;
}

}  // namespace pcgkit
