#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "pcgkit/common.hpp"
#include "pcgkit/denoise.hpp"
#include "pcgkit/features.hpp"
#include "pcgkit/mlp.hpp"
#include "pcgkit/reduce.hpp"
#include "pcgkit/svm.hpp"

namespace pcgkit {

/// Every tunable of the pipeline, at its default value. Config files are flat
/// `section.key=value` lines with `#` comments; unknown keys are rejected and
/// all values are validated against the owning module's preconditions.
struct RunConfig {
    // preprocessing
    double cutoff_hz = 60.0;
    int fir_order = 256;  // at 4 kHz, scaled with the sample rate
    std::string wavelet = "db4";
    int dwt_levels = 6;
    std::string selection = "heursure";
    std::string thresholding = "hard";

    // features
    int envelope_window = 100;
    double peak_height = 0.08;
    int peak_distance = 400;
    double frame_len_s = 0.025;
    double hop_s = 0.010;

    // reduction
    int pca_components = 460;
    double pca_variance_target = 0.0;  // > 0 switches the policy

    // svm
    double svm_c = 1.0;
    double svm_gamma = 0.0;  // 0 = auto
    double svm_tol = 1e-3;
    int svm_max_iter = 200000;

    // mlp
    double mlp_learning_rate = 1e-3;
    int mlp_batch_size = 32;
    double mlp_beta1 = 0.9;
    double mlp_beta2 = 0.999;
    double mlp_epsilon = 1e-8;

    // experiment epochs
    int epochs_exp1 = 500;
    int epochs_exp2 = 50;
    int epochs_exp3 = 100;

    std::uint64_t seed = 0;
    int jobs = 1;

    PreprocessConfig preprocess_config() const {
        PreprocessConfig c;
        c.highpass_cutoff_hz = cutoff_hz;
        c.fir_base_order = fir_order;
        c.denoise.wavelet = wavelet;
        c.denoise.levels = dwt_levels;
        c.denoise.selection = selection_from_string(selection);
        c.denoise.thresholding = thresholding_from_string(thresholding);
        return c;
    }

    FeatureConfig feature_config() const {
        FeatureConfig c;
        c.acoustic.frame_len_s = frame_len_s;
        c.acoustic.hop_s = hop_s;
        c.peaks.envelope_window = envelope_window;
        c.peaks.min_height = peak_height;
        c.peaks.min_distance = peak_distance;
        return c;
    }

    PcaPolicy pca_policy() const {
        PcaPolicy p;
        if (pca_variance_target > 0.0) {
            p.variance_target = pca_variance_target;
            p.component_count = 0;
        } else {
            p.component_count = pca_components;
        }
        return p;
    }

    SvmParams svm_params() const {
        SvmParams p;
        p.c = svm_c;
        p.gamma = svm_gamma;
        p.tol = svm_tol;
        p.max_iter = svm_max_iter;
        p.seed = seed;
        return p;
    }

    MlpTrainConfig mlp_train_config(int epochs) const {
        MlpTrainConfig c;
        c.epochs = epochs;
        c.batch_size = mlp_batch_size;
        c.learning_rate = mlp_learning_rate;
        c.beta1 = mlp_beta1;
        c.beta2 = mlp_beta2;
        c.epsilon = mlp_epsilon;
        c.seed = seed;
        return c;
    }
};

inline void validate_config(const RunConfig& c) {
    if (!(c.cutoff_hz > 0.0)) throw ConfigError("preprocess.cutoff_hz must be > 0");
    if (c.fir_order < 2 || c.fir_order % 2 != 0)
        throw ConfigError("preprocess.fir_order must be a positive even number");
    wavelet_bank(c.wavelet);  // throws on unknown name
    if (c.dwt_levels < 1) throw ConfigError("dwt.levels must be >= 1");
    selection_from_string(c.selection);
    thresholding_from_string(c.thresholding);
    if (c.envelope_window < 1) throw ConfigError("envelope.window must be >= 1");
    if (!(c.peak_height > 0.0)) throw ConfigError("peaks.height must be > 0");
    if (c.peak_distance < 1) throw ConfigError("peaks.distance must be >= 1");
    if (!(c.frame_len_s > 0.0)) throw ConfigError("acoustic.frame_len_s must be > 0");
    if (!(c.hop_s > 0.0)) throw ConfigError("acoustic.hop_s must be > 0");
    if (c.pca_components < 1) throw ConfigError("pca.components must be >= 1");
    if (c.pca_variance_target < 0.0 || c.pca_variance_target > 1.0)
        throw ConfigError("pca.variance_target must lie in (0, 1]");
    if (!(c.svm_c > 0.0)) throw ConfigError("svm.c must be > 0");
    if (c.svm_gamma < 0.0) throw ConfigError("svm.gamma must be >= 0 (0 = auto)");
    if (!(c.svm_tol > 0.0)) throw ConfigError("svm.tol must be > 0");
    if (c.svm_max_iter < 1) throw ConfigError("svm.max_iter must be >= 1");
    if (!(c.mlp_learning_rate > 0.0)) throw ConfigError("mlp.learning_rate must be > 0");
    if (c.mlp_batch_size < 1) throw ConfigError("mlp.batch_size must be >= 1");
    if (c.mlp_beta1 < 0.0 || c.mlp_beta1 >= 1.0) throw ConfigError("mlp.beta1 must lie in [0, 1)");
    if (c.mlp_beta2 < 0.0 || c.mlp_beta2 >= 1.0) throw ConfigError("mlp.beta2 must lie in [0, 1)");
    if (!(c.mlp_epsilon > 0.0)) throw ConfigError("mlp.epsilon must be > 0");
    if (c.epochs_exp1 < 1 || c.epochs_exp2 < 1 || c.epochs_exp3 < 1)
        throw ConfigError("experiment epochs must be >= 1");
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
}

inline void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    auto as_double = [&](const std::string& v) {
        try {
            size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
        }
    };
    auto as_int = [&](const std::string& v) {
        try {
            size_t used = 0;
            const long d = std::stol(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return static_cast<int>(d);
        } catch (const std::exception&) {
            throw ConfigError("bad integer value for " + key + ": '" + value + "'");
        }
    };

    if (key == "preprocess.cutoff_hz") c.cutoff_hz = as_double(value);
    else if (key == "preprocess.fir_order") c.fir_order = as_int(value);
    else if (key == "dwt.wavelet") c.wavelet = value;
    else if (key == "dwt.levels") c.dwt_levels = as_int(value);
    else if (key == "denoise.selection") c.selection = value;
    else if (key == "denoise.thresholding") c.thresholding = value;
    else if (key == "envelope.window") c.envelope_window = as_int(value);
    else if (key == "peaks.height") c.peak_height = as_double(value);
    else if (key == "peaks.distance") c.peak_distance = as_int(value);
    else if (key == "acoustic.frame_len_s") c.frame_len_s = as_double(value);
    else if (key == "acoustic.hop_s") c.hop_s = as_double(value);
    else if (key == "pca.components") c.pca_components = as_int(value);
    else if (key == "pca.variance_target") c.pca_variance_target = as_double(value);
    else if (key == "svm.c") c.svm_c = as_double(value);
    else if (key == "svm.gamma") c.svm_gamma = as_double(value);
    else if (key == "svm.tol") c.svm_tol = as_double(value);
    else if (key == "svm.max_iter") c.svm_max_iter = as_int(value);
    else if (key == "mlp.learning_rate") c.mlp_learning_rate = as_double(value);
    else if (key == "mlp.batch_size") c.mlp_batch_size = as_int(value);
    else if (key == "mlp.beta1") c.mlp_beta1 = as_double(value);
    else if (key == "mlp.beta2") c.mlp_beta2 = as_double(value);
    else if (key == "mlp.epsilon") c.mlp_epsilon = as_double(value);
    else if (key == "experiment.epochs_exp1") c.epochs_exp1 = as_int(value);
    else if (key == "experiment.epochs_exp2") c.epochs_exp2 = as_int(value);
    else if (key == "experiment.epochs_exp3") c.epochs_exp3 = as_int(value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "jobs") c.jobs = as_int(value);
    else throw ConfigError("unknown config key: " + key);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    RunConfig c;
    std::string line;
    size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        const size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const size_t e = line.find_last_not_of(" \t");
        line = line.substr(b, e - b + 1);
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value at " + path + ":" + std::to_string(lineno));
        auto strip = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            const size_t z = s.find_last_not_of(" \t");
            return s.substr(a, z - a + 1);
        };
        apply_config_entry(c, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    validate_config(c);
    return c;
}

}  // namespace pcgkit
