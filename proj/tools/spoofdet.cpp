// Command-line front end tying the pipeline together:
//   synth -> featurize -> train -> score -> eer, plus sweep and inspect.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "spoofdet/corpus.hpp"
#include "spoofdet/pipeline.hpp"
#include "spoofdet/scoring.hpp"
#include "spoofdet/trainer.hpp"

namespace fs = std::filesystem;
using namespace spoofdet;

namespace {

// ---------------------------------------------------------------- config

struct ExperimentConfig {
    // [paths]
    std::string train_manifest, train_audio, train_features;
    std::string dev_manifest, dev_audio, dev_features;
    std::string norm_stats;
    std::string out = "run";
    // [features]
    FeatureParams features;
    // [model]
    std::string model = "model3";  // model3 | path to a config file
    std::string activation = "mfm";
    // [train]
    TrainConfig train;
    // [scoring]
    std::string method = "rocch";
};

std::map<std::string, std::map<std::string, std::string>> parse_ini(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path.string());
    std::map<std::string, std::map<std::string, std::string>> out;
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto strip = [](std::string s) {
            const char* ws = " \t\r\n";
            auto b = s.find_first_not_of(ws);
            if (b == std::string::npos) return std::string();
            auto e = s.find_last_not_of(ws);
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                         ": unterminated section header");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": expected key = value");
        out[section][strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return out;
}

bool parse_bool(const std::string& v, const std::string& what) {
    if (v == "yes" || v == "true" || v == "1" || v == "on") return true;
    if (v == "no" || v == "false" || v == "0" || v == "off") return false;
    throw std::runtime_error("bad boolean for " + what + ": '" + v + "'");
}

ExperimentConfig load_experiment(const fs::path& path) {
    auto ini = parse_ini(path);
    ExperimentConfig cfg;
    auto get = [&](const std::string& sec, const std::string& key,
                   std::optional<std::string> fallback = std::nullopt) {
        auto s = ini.find(sec);
        if (s != ini.end()) {
            auto k = s->second.find(key);
            if (k != s->second.end()) return k->second;
        }
        if (fallback) return *fallback;
        throw std::runtime_error(path.string() + ": missing " + sec + "." + key);
    };

    cfg.train_manifest = get("paths", "train_manifest");
    cfg.train_audio = get("paths", "train_audio", "");
    cfg.train_features = get("paths", "train_features");
    cfg.dev_manifest = get("paths", "dev_manifest");
    cfg.dev_audio = get("paths", "dev_audio", "");
    cfg.dev_features = get("paths", "dev_features");
    cfg.norm_stats = get("paths", "norm_stats", "");
    cfg.out = get("paths", "out", cfg.out);

    cfg.features.spectrogram.fft_size = std::stoull(get("features", "fft_size", "256"));
    cfg.features.spectrogram.window_size = std::stoull(get("features", "window_size", "256"));
    cfg.features.spectrogram.hop = std::stoull(get("features", "hop", "160"));
    cfg.features.spectrogram.log_floor = std::stod(get("features", "log_floor", "1e-10"));
    const std::string mode = get("features", "mode", "split");
    if (mode == "split")
        cfg.features.split_mode = true;
    else if (mode == "single")
        cfg.features.split_mode = false;
    else
        throw std::runtime_error("features.mode must be split or single, got '" + mode + "'");
    cfg.features.split.spec_wind = std::stoull(get("features", "spec_wind", "100"));
    cfg.features.split.wind_shift = std::stoull(get("features", "wind_shift", "100"));
    cfg.features.single_seconds = std::stod(get("features", "seconds", "3.0"));
    cfg.features.trim_zeros = parse_bool(get("features", "trim_zeros", "no"), "features.trim_zeros");

    cfg.model = get("model", "config", "model3");
    cfg.activation = get("model", "activation", "mfm");

    cfg.train.batch_size = std::stoull(get("train", "batch_size", "32"));
    cfg.train.max_epochs = std::stoull(get("train", "max_epochs", "300"));
    cfg.train.patience = std::stoull(get("train", "patience", "30"));
    cfg.train.adam.learning_rate = std::stod(get("train", "learning_rate", "1e-4"));
    cfg.train.adam.beta1 = std::stod(get("train", "beta1", "0.9"));
    cfg.train.adam.beta2 = std::stod(get("train", "beta2", "0.999"));
    cfg.train.adam.epsilon = std::stod(get("train", "epsilon", "0.1"));
    cfg.train.seed = std::stoull(get("train", "seed", "1"));

    cfg.method = get("scoring", "method", "rocch");
    if (cfg.method != "rocch" && cfg.method != "interpolated")
        throw std::runtime_error("scoring.method must be rocch or interpolated");
    return cfg;
}

void write_run_manifest(const ExperimentConfig& cfg, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write run manifest: " + path.string());
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    os << "[paths]\n";
    os << "train_manifest = " << cfg.train_manifest << "\n";
    os << "train_audio = " << cfg.train_audio << "\n";
    os << "train_features = " << cfg.train_features << "\n";
    os << "dev_manifest = " << cfg.dev_manifest << "\n";
    os << "dev_audio = " << cfg.dev_audio << "\n";
    os << "dev_features = " << cfg.dev_features << "\n";
    os << "norm_stats = " << cfg.norm_stats << "\n";
    os << "out = " << cfg.out << "\n";
    os << "\n[features]\n";
    os << "fft_size = " << cfg.features.spectrogram.fft_size << "\n";
    os << "window_size = " << cfg.features.spectrogram.window_size << "\n";
    os << "hop = " << cfg.features.spectrogram.hop << "\n";
    os << "log_floor = " << num(cfg.features.spectrogram.log_floor) << "\n";
    os << "mode = " << (cfg.features.split_mode ? "split" : "single") << "\n";
    os << "spec_wind = " << cfg.features.split.spec_wind << "\n";
    os << "wind_shift = " << cfg.features.split.wind_shift << "\n";
    os << "seconds = " << num(cfg.features.single_seconds) << "\n";
    os << "trim_zeros = " << (cfg.features.trim_zeros ? "yes" : "no") << "\n";
    os << "\n[model]\n";
    os << "config = " << cfg.model << "\n";
    os << "activation = " << cfg.activation << "\n";
    os << "\n[train]\n";
    os << "batch_size = " << cfg.train.batch_size << "\n";
    os << "max_epochs = " << cfg.train.max_epochs << "\n";
    os << "patience = " << cfg.train.patience << "\n";
    os << "learning_rate = " << num(cfg.train.adam.learning_rate) << "\n";
    os << "beta1 = " << num(cfg.train.adam.beta1) << "\n";
    os << "beta2 = " << num(cfg.train.adam.beta2) << "\n";
    os << "epsilon = " << num(cfg.train.adam.epsilon) << "\n";
    os << "seed = " << cfg.train.seed << "\n";
    os << "\n[scoring]\n";
    os << "method = " << cfg.method << "\n";
}

ActivationKind parse_activation(const std::string& name) {
    if (name == "mfm") return ActivationKind::mfm;
    if (name == "relu") return ActivationKind::relu;
    if (name == "elu") return ActivationKind::elu;
    throw std::runtime_error("unknown activation '" + name + "' (want mfm, relu or elu)");
}

EerMethod parse_method(const std::string& name) {
    if (name == "rocch") return EerMethod::rocch;
    if (name == "interpolated") return EerMethod::interpolated;
    throw std::runtime_error("unknown eer method '" + name + "' (want rocch or interpolated)");
}

// Model input dims follow the representation: split windows are
// spec_wind x F, a single spectrogram is floor(seconds*sr/hop) x F.
std::pair<std::size_t, std::size_t> model_input_dims(const FeatureParams& f, int sample_rate) {
    const std::size_t bins = f.spectrogram.fft_size / 2 + 1;
    if (f.split_mode) return {f.split.spec_wind, bins};
    const auto frames = static_cast<std::size_t>(
        std::llround(f.single_seconds * sample_rate) / static_cast<long long>(f.spectrogram.hop));
    return {frames, bins};
}

ModelConfig resolve_model(const ExperimentConfig& cfg) {
    if (cfg.model == "model3") {
        auto [t, f] = model_input_dims(cfg.features, 16000);
        return model3_default(t, f, parse_activation(cfg.activation));
    }
    return load_config(cfg.model);
}

std::vector<ProtocolEntry> load_manifest(const std::string& path) {
    return apply_blacklist(parse_protocol(path));
}

// ---------------------------------------------------------------- synth

int cmd_synth(const fs::path& out_dir, std::uint64_t seed, std::size_t train_genuine,
              std::size_t train_spoof, std::size_t dev_genuine, std::size_t dev_spoof,
              std::size_t eval_genuine, std::size_t eval_spoof, double min_seconds,
              double max_seconds, double cutoff, double noise, std::size_t configurations) {
    struct Subset {
        const char* name;
        const char* prefix;
        std::size_t genuine, spoof;
    };
    const Subset subsets[] = {{"train", "T", train_genuine, train_spoof},
                              {"dev", "D", dev_genuine, dev_spoof},
                              {"eval", "E", eval_genuine, eval_spoof}};
    for (const Subset& s : subsets) {
        if (s.genuine == 0 && s.spoof == 0) continue;
        SynthConfig cfg;
        cfg.n_genuine = s.genuine;
        cfg.n_spoof = s.spoof;
        cfg.min_seconds = min_seconds;
        cfg.max_seconds = max_seconds;
        cfg.lowpass_cutoff_hz = cutoff;
        cfg.channel_noise = noise;
        cfg.n_configurations = configurations;
        cfg.seed = mix_seed(seed, s.name);
        cfg.file_prefix = s.prefix;
        auto entries = generate_synthetic_corpus(cfg, out_dir / s.name);
        ConfigurationStats stats = configuration_stats(entries);
        std::printf("%s: %zu genuine + %zu spoofed -> %s\n", s.name, s.genuine, s.spoof,
                    (out_dir / s.name).string().c_str());
        for (const auto& [key, count] : stats.joint)
            std::printf("  configuration %s (%zu)\n", key.c_str(), count);
    }
    return 0;
}

// ------------------------------------------------------------- featurize

int cmd_featurize(const std::string& manifest, const std::string& audio_root,
                  const std::string& out, const FeatureParams& params, bool fit_norm,
                  const std::string& norm_file) {
    auto entries = load_manifest(manifest);
    if (fit_norm) {
        NormStats stats = fit_norm_from_manifest(entries, audio_root, params);
        write_norm_stats(out, stats);
        std::printf("norm stats over %zu utterances -> %s\n", entries.size(), out.c_str());
        return 0;
    }
    std::optional<NormStats> norm;
    if (!norm_file.empty()) norm = read_norm_stats(norm_file);
    featurize_manifest(entries, audio_root, params, norm ? &*norm : nullptr, out);
    std::printf("featurized %zu utterances -> %s\n", entries.size(), out.c_str());
    return 0;
}

// ----------------------------------------------------------------- train

int cmd_train(ExperimentConfig cfg) {
    const fs::path out_dir = cfg.out;
    fs::create_directories(out_dir);

    auto train_entries = load_manifest(cfg.train_manifest);
    auto dev_entries = load_manifest(cfg.dev_manifest);
    auto train_set = load_examples(train_entries, cfg.train_features);
    auto dev_set = load_examples(dev_entries, cfg.dev_features);

    ModelConfig model_cfg = resolve_model(cfg);
    Network net = build(model_cfg, mix_seed(cfg.train.seed, "init"));

    cfg.train.checkpoint_path = (out_dir / "checkpoint.ckpt").string();
    TrainResult result = train(net, train_set, dev_set, cfg.train);

    save_config(out_dir / "model.config", model_cfg);
    write_epoch_log(out_dir / "train.log", result.logs);
    write_run_manifest(cfg, out_dir / "run_manifest.ini");

    std::printf("trained %zu epochs; best dev loss %.6f at epoch %zu\n", result.logs.size(),
                result.logs[result.best_epoch - 1].dev_loss, result.best_epoch);
    std::printf("checkpoint: %s\n", cfg.train.checkpoint_path.c_str());
    return 0;
}

// ----------------------------------------------------------------- score

Network load_network(const std::string& model, const std::string& checkpoint) {
    ModelConfig model_cfg = model == "model3" ? model3_default() : load_config(model);
    Network net = build(model_cfg, 0);
    restore_params(net, load_checkpoint(checkpoint));
    return net;
}

int cmd_score(const std::string& checkpoint, const std::string& model, const std::string& manifest,
              const std::string& features, const std::string& out, const std::string& backend,
              const std::string& fit_manifest, const std::string& fit_features) {
    Network net = load_network(model, checkpoint);
    auto entries = load_manifest(manifest);
    auto examples = load_examples(entries, features);

    ScoreSet scores;
    if (backend == "endtoend") {
        scores = score_examples(net, examples);
    } else if (backend == "gaussian") {
        if (fit_manifest.empty() || fit_features.empty())
            throw std::runtime_error("gaussian backend needs --fit-manifest and --fit-features");
        auto fit_set = load_examples(load_manifest(fit_manifest), fit_features);
        scores = score_examples_gaussian(net, fit_set, examples);
    } else {
        throw std::runtime_error("unknown backend '" + backend + "' (want endtoend or gaussian)");
    }
    write_scores(scores, out);
    std::printf("scored %zu utterances -> %s\n", scores.size(), out.c_str());
    return 0;
}

// ------------------------------------------------------------------- eer

int cmd_eer(const std::string& scores_path, const std::string& method) {
    ScoreSet scores = read_scores(scores_path);
    const double value = eer(scores, parse_method(method));
    std::printf("EER: %.2f%%\n", 100.0 * value);
    return 0;
}

// ----------------------------------------------------------------- sweep

int cmd_sweep(const ExperimentConfig& base, const std::string& axis, std::string settings_csv) {
    std::vector<std::string> settings;
    if (settings_csv.empty()) {
        if (axis == "batch")
            settings = {"8", "16", "32", "64"};
        else if (axis == "activation")
            settings = {"mfm", "relu", "elu"};
        else if (axis == "representation")
            settings = {"split", "single"};
        else
            throw std::runtime_error("unknown sweep axis '" + axis + "'");
    } else {
        std::stringstream ss(std::move(settings_csv));
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) settings.push_back(item);
    }
    if (settings.empty()) throw std::runtime_error("sweep needs at least one setting");
    if (base.train_audio.empty() || base.dev_audio.empty())
        throw std::runtime_error(
            "sweep featurizes from audio; set paths.train_audio and paths.dev_audio");

    auto train_entries = load_manifest(base.train_manifest);
    auto dev_entries = load_manifest(base.dev_manifest);

    std::printf("%-14s %s\n", axis.c_str(), "dev EER");
    for (const std::string& setting : settings) {
        ExperimentConfig cfg = base;
        if (axis == "batch")
            cfg.train.batch_size = std::stoull(setting);
        else if (axis == "activation")
            cfg.activation = setting;
        else if (setting == "split" || setting == "single")
            cfg.features.split_mode = setting == "split";
        else
            throw std::runtime_error("representation settings are split|single");

        NormStats norm = fit_norm_from_manifest(train_entries, base.train_audio, cfg.features);
        auto train_set = featurize_examples(train_entries, base.train_audio, cfg.features, &norm);
        auto dev_set = featurize_examples(dev_entries, base.dev_audio, cfg.features, &norm);

        ModelConfig model_cfg = resolve_model(cfg);
        Network net = build(model_cfg, mix_seed(cfg.train.seed, "init"));
        TrainConfig tc = cfg.train;
        tc.checkpoint_path.clear();
        TrainResult result = train(net, train_set, dev_set, tc);
        ScoreSet scores = score_examples(result.best, dev_set);
        const double value = eer(scores, parse_method(cfg.method));
        std::printf("%-14s %.2f%%\n", setting.c_str(), 100.0 * value);
        std::fflush(stdout);
    }
    return 0;
}

// --------------------------------------------------------------- inspect

int cmd_inspect(const std::string& model, const std::string& activation, std::size_t time_frames,
                std::size_t freq_bins) {
    ModelConfig cfg = model == "model3"
                          ? model3_default(time_frames, freq_bins, parse_activation(activation))
                          : load_config(model);
    cfg.validate();
    std::printf("params: %zu\n", count_params(cfg));
    for (const auto& [name, shape] : shape_trace(cfg))
        std::printf("  %-24s -> %s\n", name.c_str(), nn::shape_str(shape).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
    // Activation buffers churn tens of MB per batch; keep them in the
    // arena instead of paying mmap/munmap page faults on every step.
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, -1);
#endif

    CLI::App app{"replay spoofing detection toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic corpus");
    std::string synth_out = "synth";
    std::uint64_t synth_seed = 1;
    std::size_t tg = 200, ts = 200, dg = 50, ds = 50, eg = 0, es = 0, n_configs = 3;
    double min_seconds = 1.0, max_seconds = 3.0, cutoff = 2800.0, noise = 0.004;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", synth_seed, "corpus seed");
    synth->add_option("--train-genuine", tg);
    synth->add_option("--train-spoof", ts);
    synth->add_option("--dev-genuine", dg);
    synth->add_option("--dev-spoof", ds);
    synth->add_option("--eval-genuine", eg);
    synth->add_option("--eval-spoof", es);
    synth->add_option("--min-seconds", min_seconds);
    synth->add_option("--max-seconds", max_seconds);
    synth->add_option("--cutoff", cutoff, "replay channel low-pass corner (Hz)");
    synth->add_option("--noise", noise, "replay channel noise level");
    synth->add_option("--configurations", n_configs, "distinct spoofing configurations");

    // featurize
    auto* feat = app.add_subcommand("featurize", "turn WAVs into spectrogram caches");
    std::string feat_manifest, feat_audio, feat_out, feat_norm;
    bool fit_norm = false, single = false, trim_zeros = false;
    FeatureParams fp;
    feat->add_option("--manifest", feat_manifest)->required();
    feat->add_option("--audio-root", feat_audio)->required();
    feat->add_option("--out", feat_out, "cache directory (or stats file with --fit-norm)")
        ->required();
    feat->add_option("--fft", fp.spectrogram.fft_size);
    feat->add_option("--window", fp.spectrogram.window_size);
    feat->add_option("--hop", fp.spectrogram.hop);
    feat->add_option("--log-floor", fp.spectrogram.log_floor);
    feat->add_option("--split-window", fp.split.spec_wind, "split window (frames)");
    feat->add_option("--split-shift", fp.split.wind_shift, "split shift (frames)");
    feat->add_flag("--single", single, "one fixed-length spectrogram instead of splits");
    feat->add_option("--seconds", fp.single_seconds, "fixed length for --single");
    feat->add_flag("--trim-zeros", trim_zeros, "drop the exactly-zero leading samples");
    feat->add_flag("--fit-norm", fit_norm, "write per-bin mean/std stats instead of caches");
    feat->add_option("--norm", feat_norm, "apply these stats while featurizing");

    // train
    auto* tr = app.add_subcommand("train", "train a model from feature caches");
    std::string train_config;
    tr->add_option("--config", train_config, "experiment config (ini)")->required();
    std::optional<std::size_t> o_batch, o_epochs, o_patience;
    std::optional<double> o_lr;
    std::optional<std::uint64_t> o_seed;
    std::optional<std::string> o_act, o_out, o_model;
    tr->add_option("--batch-size", o_batch);
    tr->add_option("--max-epochs", o_epochs);
    tr->add_option("--patience", o_patience);
    tr->add_option("--learning-rate", o_lr);
    tr->add_option("--seed", o_seed);
    tr->add_option("--activation", o_act, "mfm|relu|elu");
    tr->add_option("--out", o_out);
    tr->add_option("--model", o_model, "model3 or a model config path");

    // score
    auto* sc = app.add_subcommand("score", "write per-utterance LLR scores");
    std::string sc_ckpt, sc_model = "model3", sc_manifest, sc_features, sc_out;
    std::string sc_backend = "endtoend", sc_fit_manifest, sc_fit_features;
    sc->add_option("--checkpoint", sc_ckpt)->required();
    sc->add_option("--model", sc_model, "model3 or a model config path");
    sc->add_option("--manifest", sc_manifest)->required();
    sc->add_option("--features", sc_features)->required();
    sc->add_option("--out", sc_out)->required();
    sc->add_option("--backend", sc_backend, "endtoend|gaussian");
    sc->add_option("--fit-manifest", sc_fit_manifest, "training manifest for the gaussian backend");
    sc->add_option("--fit-features", sc_fit_features, "training features for the gaussian backend");

    // eer
    auto* ee = app.add_subcommand("eer", "equal error rate of a labeled score file");
    std::string eer_scores, eer_method = "rocch";
    ee->add_option("--scores", eer_scores)->required();
    ee->add_option("--method", eer_method, "rocch|interpolated");

    // sweep
    auto* sw = app.add_subcommand("sweep", "train/score/eer over one axis");
    std::string sweep_config, sweep_axis, sweep_settings;
    sw->add_option("--config", sweep_config, "experiment config (ini)")->required();
    sw->add_option("--axis", sweep_axis, "batch|activation|representation")->required();
    sw->add_option("--settings", sweep_settings, "comma-separated override of the axis values");

    // inspect
    auto* in = app.add_subcommand("inspect", "parameter count and shape trace");
    std::string in_model = "model3", in_act = "mfm";
    std::size_t in_time = 100, in_freq = 129;
    in->add_option("--model", in_model, "model3 or a model config path");
    in->add_option("--activation", in_act, "mfm|relu|elu (model3 only)");
    in->add_option("--time", in_time, "input frames (model3 only)");
    in->add_option("--freq", in_freq, "input bins (model3 only)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth)
            return cmd_synth(synth_out, synth_seed, tg, ts, dg, ds, eg, es, min_seconds,
                             max_seconds, cutoff, noise, n_configs);
        if (*feat) {
            fp.split_mode = !single;
            fp.trim_zeros = trim_zeros;
            fp.validate();
            return cmd_featurize(feat_manifest, feat_audio, feat_out, fp, fit_norm, feat_norm);
        }
        if (*tr) {
            ExperimentConfig cfg = load_experiment(train_config);
            if (o_batch) cfg.train.batch_size = *o_batch;
            if (o_epochs) cfg.train.max_epochs = *o_epochs;
            if (o_patience) cfg.train.patience = *o_patience;
            if (o_lr) cfg.train.adam.learning_rate = *o_lr;
            if (o_seed) cfg.train.seed = *o_seed;
            if (o_act) cfg.activation = *o_act;
            if (o_out) cfg.out = *o_out;
            if (o_model) cfg.model = *o_model;
            return cmd_train(std::move(cfg));
        }
        if (*sc)
            return cmd_score(sc_ckpt, sc_model, sc_manifest, sc_features, sc_out, sc_backend,
                             sc_fit_manifest, sc_fit_features);
        if (*ee) return cmd_eer(eer_scores, eer_method);
        if (*sw) return cmd_sweep(load_experiment(sweep_config), sweep_axis, sweep_settings);
        if (*in) return cmd_inspect(in_model, in_act, in_time, in_freq);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
