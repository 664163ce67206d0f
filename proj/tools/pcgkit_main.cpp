// pcgkit — command-line front end for the heart-sound classification toolkit.
// Subcommands mirror the pipeline stages so every intermediate artifact
// (denoised WAVs, feature CSVs, fitted models, reports) can be inspected.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcgkit/pcgkit.hpp"

namespace {

using pcgkit::RunConfig;

struct CliContext {
    RunConfig cfg;  // defaults, possibly overlaid by --config before flag parsing
};

int run_synth(const CliContext& ctx, const std::string& out, std::string events_path, double bpm,
              double duration, int sample_rate, bool murmur, bool extrasystole, double noise_rms,
              std::uint64_t seed) {
    pcgkit::SynthConfig sc;
    sc.bpm = bpm;
    sc.duration_s = duration;
    sc.sample_rate_hz = sample_rate;
    sc.murmur = murmur;
    sc.extrasystole = extrasystole;
    sc.noise_rms = noise_rms;
    sc.seed = seed;
    const pcgkit::SynthResult r = pcgkit::synth_pcg(sc);
    pcgkit::write_wav(r.audio, out);
    if (events_path.empty()) events_path = out + ".events.json";
    std::ofstream f(events_path, std::ios::trunc);
    if (!f) throw pcgkit::Error("cannot open for writing: " + events_path);
    f << pcgkit::synth_events_json(sc, r).dump(2) << '\n';
    std::cout << "wrote " << out << " and " << events_path << " (" << r.events.size()
              << " events)\n";
    (void)ctx;
    return 0;
}

int run_denoise(const CliContext& ctx, const std::string& in, const std::string& out) {
    pcgkit::AudioSample s = pcgkit::read_wav(in);
    s = pcgkit::preprocess_pipeline(s, ctx.cfg.preprocess_config());
    pcgkit::write_wav(s, out);
    std::cout << "wrote " << out << '\n';
    return 0;
}

int run_features(const CliContext& ctx, const std::string& manifest_path, const std::string& out,
                 const std::string& dump_dir) {
    const pcgkit::DatasetManifest m = pcgkit::load_manifest(manifest_path);
    const pcgkit::FeatureMatrix feats = pcgkit::extract_corpus_features(m, ctx.cfg);
    pcgkit::save_features_csv(feats, out);
    if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        const auto pre = ctx.cfg.preprocess_config();
        const auto fc = ctx.cfg.feature_config();
        for (const auto& r : m.records) {
            pcgkit::AudioSample s = pcgkit::read_wav(r.path);
            s = pcgkit::preprocess_pipeline(s, pre);
            const std::string name =
                std::filesystem::path(r.path).stem().string() + ".envelope.csv";
            pcgkit::dump_envelope_csv(s, fc.peaks, (std::filesystem::path(dump_dir) / name).string());
        }
    }
    std::cout << "wrote " << out << " (" << feats.rows.size() << " rows x "
              << feats.column_names.size() << " features)\n";
    return 0;
}

std::vector<std::string> class_order_present(const std::vector<pcgkit::Label>& labels) {
    std::vector<std::string> order;
    for (const char* name : {"normal", "murmur", "extrasys"}) {
        for (const auto& l : labels)
            if (pcgkit::to_string(l) == name) {
                order.emplace_back(name);
                break;
            }
    }
    return order;
}

int run_reduce(const CliContext& ctx, bool fit, bool apply, const std::string& features_path,
               const std::string& model_path, const std::string& out) {
    if (fit == apply) throw pcgkit::ConfigError("reduce: pass exactly one of --fit / --apply");
    const pcgkit::FeatureMatrix feats = pcgkit::load_features_csv(features_path);

    if (fit) {
        pcgkit::ReductionModel rm;
        rm.standardizer = pcgkit::fit_standardizer(feats.rows);
        std::vector<std::vector<double>> std_rows = feats.rows;
        for (auto& r : std_rows) r = pcgkit::apply_standardizer(rm.standardizer, r);
        rm.pca = pcgkit::fit_pca(std_rows, ctx.cfg.pca_policy());
        rm.feature_config_hash = feats.config_hash;
        pcgkit::save_model_json(pcgkit::to_json(rm), out);
        std::cout << "wrote " << out << " (" << rm.pca.components.size() << " components)\n";
        return 0;
    }

    const auto j = pcgkit::load_model_json(model_path);
    const pcgkit::ReductionModel rm = pcgkit::reduction_from_json(j);
    if (rm.feature_config_hash != 0 && feats.config_hash != 0 &&
        rm.feature_config_hash != feats.config_hash)
        throw pcgkit::Error("feature config mismatch between " + features_path + " and " +
                            model_path);
    pcgkit::FeatureMatrix reduced;
    reduced.ids = feats.ids;
    reduced.labels = feats.labels;
    reduced.patient_ids = feats.patient_ids;
    reduced.config_hash = pcgkit::model_content_hash(j);
    for (size_t i = 0; i < rm.pca.components.size(); ++i)
        reduced.column_names.push_back("pc" + std::to_string(i + 1));
    for (const auto& r : feats.rows) reduced.rows.push_back(pcgkit::reduce_vector(rm, r));
    pcgkit::save_features_csv(reduced, out);
    std::cout << "wrote " << out << " (" << reduced.rows.size() << " rows x "
              << reduced.column_names.size() << " components)\n";
    return 0;
}

int run_train(const CliContext& ctx, const std::string& model_kind, const std::string& features_path,
              const std::string& out, int epochs, const std::string& reduction_path,
              std::uint64_t seed) {
    const pcgkit::FeatureMatrix feats = pcgkit::load_features_csv(features_path);
    const std::vector<std::string> classes = class_order_present(feats.labels);
    if (classes.size() < 2) throw pcgkit::Error("train: need at least two classes in " + features_path);

    std::map<std::string, int> class_index;
    for (size_t c = 0; c < classes.size(); ++c) class_index[classes[c]] = static_cast<int>(c);
    std::vector<int> y;
    for (const auto& l : feats.labels) {
        const std::string name = pcgkit::to_string(l);
        if (!class_index.count(name)) throw pcgkit::Error("train: unlabeled row in " + features_path);
        y.push_back(class_index[name]);
    }

    std::uint64_t reduction_hash = 0;
    if (!reduction_path.empty())
        reduction_hash = pcgkit::model_content_hash(pcgkit::load_model_json(reduction_path));

    if (model_kind == "svm") {
        pcgkit::SvmParams p = ctx.cfg.svm_params();
        p.seed = seed;
        pcgkit::SvmModel m = pcgkit::svm_train(feats.rows, y, classes, p);
        m.feature_config_hash = feats.config_hash;
        m.reduction_model_hash = reduction_hash;
        pcgkit::save_model_json(pcgkit::to_json(m), out);
        bool all_converged = true;
        for (const auto& pair : m.pairs) all_converged = all_converged && pair.converged;
        std::cout << "wrote " << out << " (" << m.pairs.size() << " pairwise models, "
                  << (all_converged ? "converged" : "iteration budget hit") << ")\n";
    } else if (model_kind == "dnn") {
        pcgkit::MlpTrainConfig tc = ctx.cfg.mlp_train_config(epochs);
        tc.seed = seed;
        pcgkit::MlpModel init = pcgkit::mlp_init(static_cast<int>(feats.rows[0].size()),
                                                 static_cast<int>(classes.size()), seed);
        init.classes = classes;
        init.feature_config_hash = feats.config_hash;
        init.reduction_model_hash = reduction_hash;
        const auto result = pcgkit::mlp_train(std::move(init), feats.rows, y, tc);
        pcgkit::save_model_json(pcgkit::to_json(result.model), out);
        std::cout << "wrote " << out << " (final training loss "
                  << result.epoch_losses.back() << ")\n";
    } else {
        throw pcgkit::ConfigError("train: --model must be svm or dnn");
    }
    return 0;
}

int run_predict(const std::string& model_path, const std::string& features_path,
                const std::string& out) {
    const pcgkit::FeatureMatrix feats = pcgkit::load_features_csv(features_path);
    const auto j = pcgkit::load_model_json(model_path);
    const std::string format = j.value("format", "");

    std::vector<std::string> classes;
    std::vector<int> predictions;
    std::uint64_t model_feat_hash = 0;
    if (format == "pcgkit-svm") {
        const pcgkit::SvmModel m = pcgkit::svm_from_json(j);
        classes = m.classes;
        model_feat_hash = m.feature_config_hash;
        for (const auto& r : feats.rows) predictions.push_back(pcgkit::svm_predict(m, r));
    } else if (format == "pcgkit-mlp") {
        const pcgkit::MlpModel m = pcgkit::mlp_from_json(j);
        classes = m.classes;
        model_feat_hash = m.feature_config_hash;
        for (const auto& r : feats.rows) predictions.push_back(pcgkit::mlp_predict_class(m, r));
    } else {
        throw pcgkit::Error("predict: unsupported model format in " + model_path);
    }
    if (model_feat_hash != 0 && feats.config_hash != 0 && model_feat_hash != feats.config_hash)
        throw pcgkit::Error("feature config mismatch: model was trained on differently "
                            "configured features");

    std::ofstream f(out, std::ios::trunc);
    if (!f) throw pcgkit::Error("cannot open for writing: " + out);
    f << "id,label,predicted\n";
    for (size_t i = 0; i < feats.ids.size(); ++i)
        f << feats.ids[i] << ',' << pcgkit::to_string(feats.labels[i]) << ','
          << classes.at(static_cast<size_t>(predictions[i])) << '\n';
    std::cout << "wrote " << out << " (" << feats.ids.size() << " predictions)\n";
    return 0;
}

int run_experiment_cmd(const CliContext& ctx, const std::string& kind, const std::string& model,
                       const std::string& manifest_path, const std::string& out,
                       const std::string& csv_out) {
    const pcgkit::DatasetManifest m = pcgkit::load_manifest(manifest_path);
    const pcgkit::MetricsReport rep = pcgkit::run_experiment(
        pcgkit::experiment_kind_from_string(kind), pcgkit::model_kind_from_string(model), m,
        ctx.cfg);
    std::ofstream f(out, std::ios::trunc);
    if (!f) throw pcgkit::Error("cannot open for writing: " + out);
    f << pcgkit::to_json(rep).dump(2) << '\n';
    if (!csv_out.empty()) {
        std::ofstream c(csv_out, std::ios::trunc);
        if (!c) throw pcgkit::Error("cannot open for writing: " + csv_out);
        c << pcgkit::report_csv(rep);
    }
    std::cout << "wrote " << out << '\n' << pcgkit::report_csv(rep);
    return 0;
}

int run_report(const std::string& in, const std::string& format, const std::string& out) {
    const auto j = pcgkit::load_model_json(in);
    std::string text;
    if (format == "csv") {
        text = pcgkit::report_csv(pcgkit::report_from_json(j));
    } else if (format == "json") {
        text = j.dump(2) + "\n";
    } else {
        throw pcgkit::ConfigError("report: --format must be csv or json");
    }
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::trunc);
        if (!f) throw pcgkit::Error("cannot open for writing: " + out);
        f << text;
        std::cout << "wrote " << out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CliContext ctx;

    // --config merges beneath explicit flags: load it first, then let flag
    // parsing overwrite. The file also feeds defaults the subcommand does not
    // expose as flags.
    try {
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") ctx.cfg = pcgkit::load_config(argv[i + 1]);
        pcgkit::validate_config(ctx.cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    CLI::App app{"pcgkit — segmentation-free heart sound classification toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file merged beneath explicit flags");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic phonocardiogram + event log");
    std::string synth_out, synth_events;
    double synth_bpm = 60.0, synth_duration = 10.0, synth_noise = 0.0;
    int synth_rate = 4000;
    bool synth_murmur = false, synth_extra = false;
    std::uint64_t synth_seed = ctx.cfg.seed;
    synth->add_option("--out", synth_out, "output WAV path")->required();
    synth->add_option("--events", synth_events, "event-log JSON path (default: <out>.events.json)");
    synth->add_option("--bpm", synth_bpm, "heart rate")->capture_default_str();
    synth->add_option("--duration", synth_duration, "seconds")->capture_default_str();
    synth->add_option("--sample-rate", synth_rate, "Hz")->capture_default_str();
    synth->add_flag("--murmur", synth_murmur, "add systolic band-noise murmur");
    synth->add_flag("--extrasystole", synth_extra, "insert one extra beat");
    synth->add_option("--noise-rms", synth_noise, "white noise RMS")->capture_default_str();
    synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();

    // denoise
    auto* denoise = app.add_subcommand("denoise", "high-pass + wavelet denoise + normalize one WAV");
    std::string den_in, den_out;
    denoise->add_option("--in", den_in, "input WAV")->required();
    denoise->add_option("--out", den_out, "output WAV")->required();
    denoise->add_option("--cutoff", ctx.cfg.cutoff_hz, "high-pass cutoff Hz")->capture_default_str();
    denoise->add_option("--levels", ctx.cfg.dwt_levels, "decomposition levels")->capture_default_str();
    denoise->add_option("--wavelet", ctx.cfg.wavelet, "mother wavelet")->capture_default_str();
    denoise->add_option("--threshold", ctx.cfg.thresholding, "hard|soft")->capture_default_str();
    denoise->add_option("--selection", ctx.cfg.selection, "heursure|universal|sure")
        ->capture_default_str();

    // features
    auto* features = app.add_subcommand("features", "extract feature vectors for a manifest");
    std::string feat_manifest, feat_out, feat_dump;
    features->add_option("--manifest", feat_manifest, "manifest CSV")->required();
    features->add_option("--out", feat_out, "output features CSV")->required();
    features->add_option("--dump-envelope", feat_dump, "directory for per-sample envelope CSVs");
    features->add_option("--window", ctx.cfg.envelope_window, "envelope window (samples)")
        ->capture_default_str();
    features->add_option("--height", ctx.cfg.peak_height, "peak height threshold")
        ->capture_default_str();
    features->add_option("--distance", ctx.cfg.peak_distance, "peak distance (samples)")
        ->capture_default_str();
    features->add_option("--jobs", ctx.cfg.jobs, "worker threads")->capture_default_str();

    // reduce
    auto* reduce = app.add_subcommand("reduce", "fit or apply standardizer + PCA");
    bool red_fit = false, red_apply = false;
    std::string red_features, red_model, red_out;
    reduce->add_flag("--fit", red_fit, "fit a reduction model");
    reduce->add_flag("--apply", red_apply, "apply a fitted reduction model");
    reduce->add_option("--features", red_features, "features CSV")->required();
    reduce->add_option("--model", red_model, "fitted reduction model (for --apply)");
    reduce->add_option("--out", red_out, "output path")->required();
    reduce->add_option("--components", ctx.cfg.pca_components, "components to retain")
        ->capture_default_str();
    reduce->add_option("--variance-target", ctx.cfg.pca_variance_target,
                       "retain smallest prefix reaching this variance ratio (overrides --components)")
        ->capture_default_str();

    // train
    auto* train = app.add_subcommand("train", "train a classifier on a features CSV");
    std::string train_model, train_features, train_out, train_reduction;
    int train_epochs = 100;
    std::uint64_t train_seed = ctx.cfg.seed;
    train->add_option("--model", train_model, "svm|dnn")->required();
    train->add_option("--features", train_features, "features CSV (typically reduced)")->required();
    train->add_option("--out", train_out, "output model JSON")->required();
    train->add_option("--epochs", train_epochs, "dnn training epochs")->capture_default_str();
    train->add_option("--reduction", train_reduction, "reduction model to fingerprint");
    train->add_option("--seed", train_seed, "training seed")->capture_default_str();
    train->add_option("--svm-c", ctx.cfg.svm_c, "SVM C")->capture_default_str();
    train->add_option("--svm-gamma", ctx.cfg.svm_gamma, "RBF gamma (0 = auto)")
        ->capture_default_str();
    train->add_option("--learning-rate", ctx.cfg.mlp_learning_rate, "Adam step size")
        ->capture_default_str();
    train->add_option("--batch-size", ctx.cfg.mlp_batch_size, "mini-batch size")
        ->capture_default_str();

    // predict
    auto* predict = app.add_subcommand("predict", "run a trained model over a features CSV");
    std::string pred_model, pred_features, pred_out;
    predict->add_option("--model", pred_model, "model JSON")->required();
    predict->add_option("--features", pred_features, "features CSV")->required();
    predict->add_option("--out", pred_out, "predictions CSV")->required();

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a full experiment protocol");
    std::string exp_kind, exp_model, exp_manifest, exp_out, exp_csv;
    experiment->add_option("--kind", exp_kind, "exp1|exp2|exp3")->required();
    experiment->add_option("--model", exp_model, "svm|dnn")->required();
    experiment->add_option("--manifest", exp_manifest, "manifest CSV")->required();
    experiment->add_option("--out", exp_out, "report JSON path")->required();
    experiment->add_option("--csv", exp_csv, "also write the table-style CSV row here");
    experiment->add_option("--seed", ctx.cfg.seed, "experiment seed")->capture_default_str();
    experiment->add_option("--jobs", ctx.cfg.jobs, "worker threads for feature extraction")
        ->capture_default_str();
    experiment->add_option("--epochs-exp1", ctx.cfg.epochs_exp1, "dnn epochs for exp1")
        ->capture_default_str();
    experiment->add_option("--epochs-exp2", ctx.cfg.epochs_exp2, "dnn epochs for exp2")
        ->capture_default_str();
    experiment->add_option("--epochs-exp3", ctx.cfg.epochs_exp3, "dnn epochs for exp3")
        ->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "render a report JSON");
    std::string rep_in, rep_format = "csv", rep_out;
    report->add_option("--in", rep_in, "report JSON")->required();
    report->add_option("--format", rep_format, "csv|json")->capture_default_str();
    report->add_option("--out", rep_out, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        pcgkit::validate_config(ctx.cfg);
        if (synth->parsed())
            return run_synth(ctx, synth_out, synth_events, synth_bpm, synth_duration, synth_rate,
                             synth_murmur, synth_extra, synth_noise, synth_seed);
        if (denoise->parsed()) return run_denoise(ctx, den_in, den_out);
        if (features->parsed()) return run_features(ctx, feat_manifest, feat_out, feat_dump);
        if (reduce->parsed())
            return run_reduce(ctx, red_fit, red_apply, red_features, red_model, red_out);
        if (train->parsed())
            return run_train(ctx, train_model, train_features, train_out, train_epochs,
                             train_reduction, train_seed);
        if (predict->parsed()) return run_predict(pred_model, pred_features, pred_out);
        if (experiment->parsed())
            return run_experiment_cmd(ctx, exp_kind, exp_model, exp_manifest, exp_out, exp_csv);
        if (report->parsed()) return run_report(rep_in, rep_format, rep_out);
    } catch (const pcgkit::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
