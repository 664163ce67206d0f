#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"

#include "json.hpp"

namespace pcgkit {

struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<long>> counts;  // counts[true][predicted]

    long total() const {
        long t = 0;
        for (const auto& row : counts)
            for (long v : row) t += v;
        return t;
    }
};

inline ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 const std::vector<std::string>& classes) {
    if (truth.size() != predicted.size()) throw Error("confusion: length mismatch");
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(classes.size(), std::vector<long>(classes.size(), 0));
    for (size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], p = predicted[i];
        if (t < 0 || t >= static_cast<int>(classes.size()) || p < 0 ||
            p >= static_cast<int>(classes.size()))
            throw Error("confusion: label outside class order");
        ++cm.counts[static_cast<size_t>(t)][static_cast<size_t>(p)];
    }
    return cm;
}

/// Precision TP/(TP+FP) per class. A never-predicted class has no defined
/// precision; it is reported as 0 with `defined=false` so total precision
/// stays computable while the pathology remains visible.
struct PrecisionValue {
    double value = 0.0;
    bool defined = true;
};

inline std::map<std::string, PrecisionValue> precision_per_class(const ConfusionMatrix& cm) {
    std::map<std::string, PrecisionValue> out;
    const size_t k = cm.classes.size();
    for (size_t c = 0; c < k; ++c) {
        long tp = cm.counts[c][c];
        long predicted = 0;
        for (size_t t = 0; t < k; ++t) predicted += cm.counts[t][c];
        PrecisionValue pv;
        if (predicted == 0) {
            pv.value = 0.0;
            pv.defined = false;
        } else {
            pv.value = static_cast<double>(tp) / static_cast<double>(predicted);
        }
        out[cm.classes[c]] = pv;
    }
    return out;
}

/// Sensitivity/specificity of the collapsed binary "heart problem" task:
/// positive = every class other than normal. The collapse happens before
/// scoring, so murmur predicted as extrasys still counts as a caught problem.
struct SensSpec {
    double sens = 0.0;
    double spec = 0.0;
    bool sens_defined = true;
    bool spec_defined = true;
};

inline SensSpec heart_problem_sens_spec(const ConfusionMatrix& cm) {
    int normal_idx = -1;
    for (size_t c = 0; c < cm.classes.size(); ++c)
        if (cm.classes[c] == "normal") normal_idx = static_cast<int>(c);
    if (normal_idx < 0) throw Error("heart_problem_sens_spec: no 'normal' class");

    long tp = 0, fn = 0, tn = 0, fp = 0;
    const size_t k = cm.classes.size();
    for (size_t t = 0; t < k; ++t) {
        const bool true_pos = static_cast<int>(t) != normal_idx;
        for (size_t p = 0; p < k; ++p) {
            const bool pred_pos = static_cast<int>(p) != normal_idx;
            const long n = cm.counts[t][p];
            if (true_pos && pred_pos) tp += n;
            else if (true_pos && !pred_pos) fn += n;
            else if (!true_pos && pred_pos) fp += n;
            else tn += n;
        }
    }

    SensSpec s;
    if (tp + fn == 0) s.sens_defined = false;
    else s.sens = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tn + fp == 0) s.spec_defined = false;
    else s.spec = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return s;
}

inline double youden(double sens, double spec) { return sens + spec - 1.0; }

/// Discriminant power (sqrt(3)/pi) * (log10 odds of sens + log10 odds of spec).
/// Undefined when either rate touches 0 or 1 (division by zero in the odds).
inline std::optional<double> discriminant_power(double sens, double spec) {
    if (sens <= 0.0 || sens >= 1.0 || spec <= 0.0 || spec >= 1.0) return std::nullopt;
    const double k = std::sqrt(3.0) / 3.14159265358979323846;
    return k * (std::log10(sens / (1.0 - sens)) + std::log10(spec / (1.0 - spec)));
}

inline double total_precision(const std::vector<double>& precisions) {
    double sum = 0.0;
    for (double p : precisions) sum += p;
    return sum;
}

/// One result row: per-class precisions, heart-problem sensitivity/specificity,
/// Youden's index, discriminant power, total precision. `pe` exists only for
/// the three-class task; `dpower` only when defined.
struct MetricsRow {
    double pn = 0.0, pm = 0.0;
    std::optional<double> pe;
    double sens = 0.0, spec = 0.0, youden = 0.0;
    std::optional<double> dpower;
    double total_precision = 0.0;
    std::vector<std::string> flags;
};

inline MetricsRow metrics_row(const ConfusionMatrix& cm) {
    MetricsRow row;
    const auto prec = precision_per_class(cm);
    std::vector<double> precs;
    for (const auto& cls : cm.classes) {
        const auto& pv = prec.at(cls);
        precs.push_back(pv.value);
        if (!pv.defined) row.flags.push_back("precision_undefined:" + cls);
        if (cls == "normal") row.pn = pv.value;
        else if (cls == "murmur") row.pm = pv.value;
        else if (cls == "extrasys") row.pe = pv.value;
    }
    const SensSpec ss = heart_problem_sens_spec(cm);
    if (!ss.sens_defined) row.flags.push_back("sensitivity_undefined");
    if (!ss.spec_defined) row.flags.push_back("specificity_undefined");
    row.sens = ss.sens;
    row.spec = ss.spec;
    row.youden = youden(ss.sens, ss.spec);
    row.dpower = discriminant_power(ss.sens, ss.spec);
    if (!row.dpower) row.flags.push_back("dpower_undefined");
    row.total_precision = total_precision(precs);
    return row;
}

/// Cross-validated report: the per-fold rows plus their mean and (population)
/// standard deviation. Discriminant power aggregates to N/A if undefined in
/// any fold.
struct MetricsReport {
    std::string kind;
    std::string model;
    std::uint64_t seed = 0;
    std::vector<std::string> classes;
    std::vector<MetricsRow> folds;
    MetricsRow mean_row;
    MetricsRow std_row;
    bool dpower_available = true;
    std::vector<std::string> flags;
};

namespace detail {

inline void aggregate_rows(MetricsReport& rep) {
    const size_t n = rep.folds.size();
    if (n == 0) return;
    auto collect = [&](auto getter) {
        std::vector<double> v;
        for (const auto& f : rep.folds) v.push_back(getter(f));
        return v;
    };
    auto fill = [&](MetricsRow& m, MetricsRow& s, auto getter, auto setter) {
        const auto v = collect(getter);
        setter(m, mean(v));
        setter(s, stddev_pop(v));
    };
    fill(rep.mean_row, rep.std_row, [](const MetricsRow& r) { return r.pn; },
         [](MetricsRow& r, double v) { r.pn = v; });
    fill(rep.mean_row, rep.std_row, [](const MetricsRow& r) { return r.pm; },
         [](MetricsRow& r, double v) { r.pm = v; });
    fill(rep.mean_row, rep.std_row, [](const MetricsRow& r) { return r.sens; },
         [](MetricsRow& r, double v) { r.sens = v; });
    fill(rep.mean_row, rep.std_row, [](const MetricsRow& r) { return r.spec; },
         [](MetricsRow& r, double v) { r.spec = v; });
    fill(rep.mean_row, rep.std_row, [](const MetricsRow& r) { return r.youden; },
         [](MetricsRow& r, double v) { r.youden = v; });
    fill(rep.mean_row, rep.std_row, [](const MetricsRow& r) { return r.total_precision; },
         [](MetricsRow& r, double v) { r.total_precision = v; });

    const bool has_pe = rep.folds.front().pe.has_value();
    if (has_pe) {
        const auto v = collect([](const MetricsRow& r) { return r.pe.value_or(0.0); });
        rep.mean_row.pe = mean(v);
        rep.std_row.pe = stddev_pop(v);
    }

    rep.dpower_available = true;
    for (const auto& f : rep.folds)
        if (!f.dpower) rep.dpower_available = false;
    if (rep.dpower_available) {
        const auto v = collect([](const MetricsRow& r) { return *r.dpower; });
        rep.mean_row.dpower = mean(v);
        rep.std_row.dpower = stddev_pop(v);
    } else {
        rep.flags.push_back("dpower_undefined_in_some_fold");
    }
}

}  // namespace detail

/// Compute the mean/std rows from the per-fold rows.
inline void finalize_report(MetricsReport& rep) { detail::aggregate_rows(rep); }

inline nlohmann::json to_json(const MetricsRow& r) {
    nlohmann::json j;
    j["pn"] = r.pn;
    j["pm"] = r.pm;
    if (r.pe) j["pe"] = *r.pe; else j["pe"] = nullptr;
    j["sens"] = r.sens;
    j["spec"] = r.spec;
    j["youden"] = r.youden;
    if (r.dpower) j["dpower"] = *r.dpower; else j["dpower"] = nullptr;
    j["total_precision"] = r.total_precision;
    j["flags"] = r.flags;
    return j;
}

inline nlohmann::json to_json(const MetricsReport& rep) {
    nlohmann::json j;
    j["kind"] = rep.kind;
    j["model"] = rep.model;
    j["seed"] = rep.seed;
    j["classes"] = rep.classes;
    j["folds"] = nlohmann::json::array();
    for (size_t i = 0; i < rep.folds.size(); ++i) {
        nlohmann::json f = to_json(rep.folds[i]);
        f["fold"] = i;
        j["folds"].push_back(std::move(f));
    }
    j["mean"] = to_json(rep.mean_row);
    j["std"] = to_json(rep.std_row);
    j["dpower_available"] = rep.dpower_available;
    j["flags"] = rep.flags;
    return j;
}

inline MetricsRow metrics_row_from_json(const nlohmann::json& j) {
    MetricsRow r;
    r.pn = j.at("pn").get<double>();
    r.pm = j.at("pm").get<double>();
    if (!j.at("pe").is_null()) r.pe = j.at("pe").get<double>();
    r.sens = j.at("sens").get<double>();
    r.spec = j.at("spec").get<double>();
    r.youden = j.at("youden").get<double>();
    if (!j.at("dpower").is_null()) r.dpower = j.at("dpower").get<double>();
    r.total_precision = j.at("total_precision").get<double>();
    r.flags = j.at("flags").get<std::vector<std::string>>();
    return r;
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
    MetricsReport rep;
    rep.kind = j.at("kind").get<std::string>();
    rep.model = j.at("model").get<std::string>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& f : j.at("folds")) rep.folds.push_back(metrics_row_from_json(f));
    rep.mean_row = metrics_row_from_json(j.at("mean"));
    rep.std_row = metrics_row_from_json(j.at("std"));
    rep.dpower_available = j.at("dpower_available").get<bool>();
    rep.flags = j.at("flags").get<std::vector<std::string>>();
    return rep;
}

/// Table-style CSV row: header PN,PM,PE,Sens,Spec,Youden,D,TPr. Multi-fold
/// reports render mean±std cells; undefined discriminant power renders N/A.
inline std::string report_csv(const MetricsReport& rep) {
    const bool cv = rep.folds.size() > 1;
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    auto cell = [&](double m, double s) { return cv ? fmt(m) + "±" + fmt(s) : fmt(m); };

    std::string out = "PN,PM,PE,Sens,Spec,Youden,D,TPr\n";
    out += cell(rep.mean_row.pn, rep.std_row.pn) + ",";
    out += cell(rep.mean_row.pm, rep.std_row.pm) + ",";
    out += rep.mean_row.pe ? cell(*rep.mean_row.pe, rep.std_row.pe.value_or(0.0)) : std::string("");
    out += ",";
    out += cell(rep.mean_row.sens, rep.std_row.sens) + ",";
    out += cell(rep.mean_row.spec, rep.std_row.spec) + ",";
    out += cell(rep.mean_row.youden, rep.std_row.youden) + ",";
    out += rep.dpower_available && rep.mean_row.dpower
               ? cell(*rep.mean_row.dpower, rep.std_row.dpower.value_or(0.0))
               : std::string("N/A");
    out += ",";
    out += cell(rep.mean_row.total_precision, rep.std_row.total_precision) + "\n";
    return out;
}

}  // namespace pcgkit
