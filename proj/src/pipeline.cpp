#include "spoofdet/pipeline.hpp"

#include <stdexcept>

namespace spoofdet {

void FeatureParams::validate() const {
    spectrogram.validate();
    if (split_mode)
        split.validate();
    else if (single_seconds <= 0.0)
        throw std::invalid_argument("single-spectrogram seconds must be positive");
}

Spectrogram utterance_spectrogram(const Waveform& w, const FeatureParams& params) {
    params.validate();
    Waveform trimmed = trim_leading_zeros(w, params.trim_zeros);
    Waveform fixed = params.split_mode ? pad_or_truncate_whole_seconds(trimmed)
                                       : fix_length(trimmed, params.single_seconds);
    return log_power_spectrogram(fixed, params.spectrogram);
}

std::vector<Spectrogram> featurize_waveform(const Waveform& w, const FeatureParams& params,
                                            const NormStats* norm) {
    Spectrogram spec = utterance_spectrogram(w, params);
    if (norm) spec = normalize(spec, *norm);
    if (!params.split_mode) {
        std::vector<Spectrogram> one;
        one.push_back(std::move(spec));
        return one;
    }
    return split_spectrogram(spec, params.split);
}

NormStats fit_norm_from_manifest(const std::vector<ProtocolEntry>& entries,
                                 const std::filesystem::path& audio_root,
                                 const FeatureParams& params) {
    if (entries.empty()) throw std::invalid_argument("fit_norm_from_manifest: empty manifest");
    std::vector<Spectrogram> specs;
    specs.reserve(entries.size());
    for (const ProtocolEntry& e : entries)
        specs.push_back(utterance_spectrogram(read_wav(audio_root / e.file_id), params));
    return fit_normalizer(specs);
}

std::filesystem::path cache_path(const std::filesystem::path& dir, const std::string& file_id) {
    std::string stem = file_id;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".wav") stem.resize(stem.size() - 4);
    return dir / (stem + ".spg");
}

void featurize_manifest(const std::vector<ProtocolEntry>& entries,
                        const std::filesystem::path& audio_root, const FeatureParams& params,
                        const NormStats* norm, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const ProtocolEntry& e : entries) {
        const auto splits = featurize_waveform(read_wav(audio_root / e.file_id), params, norm);
        write_split_cache(cache_path(out_dir, e.file_id), splits);
    }
}

namespace {

nn::Tensor to_tensor(const Spectrogram& s) {
    return nn::Tensor({s.frames, s.bins}, s.values);
}

LabeledExample make_example(const ProtocolEntry& e, std::vector<Spectrogram>&& splits) {
    LabeledExample ex;
    ex.utt_id = e.file_id;
    ex.label = e.label;
    ex.splits.reserve(splits.size());
    for (Spectrogram& s : splits) ex.splits.push_back(to_tensor(s));
    return ex;
}

}  // namespace

std::vector<LabeledExample> load_examples(const std::vector<ProtocolEntry>& entries,
                                          const std::filesystem::path& cache_dir) {
    std::vector<LabeledExample> out;
    out.reserve(entries.size());
    for (const ProtocolEntry& e : entries) {
        auto splits = read_split_cache(cache_path(cache_dir, e.file_id));
        if (splits.empty())
            throw std::runtime_error("feature cache for " + e.file_id + " is empty");
        out.push_back(make_example(e, std::move(splits)));
    }
    return out;
}

std::vector<LabeledExample> featurize_examples(const std::vector<ProtocolEntry>& entries,
                                               const std::filesystem::path& audio_root,
                                               const FeatureParams& params, const NormStats* norm) {
    std::vector<LabeledExample> out;
    out.reserve(entries.size());
    for (const ProtocolEntry& e : entries)
        out.push_back(
            make_example(e, featurize_waveform(read_wav(audio_root / e.file_id), params, norm)));
    return out;
}

ScoreSet score_examples(const Network& net, const std::vector<LabeledExample>& examples) {
    ScoreSet scores;
    scores.reserve(examples.size());
    for (const LabeledExample& ex : examples) {
        TrialScore t;
        t.utt_id = ex.utt_id;
        t.score = score_utterance(net, ex.splits);
        t.label = ex.label;
        scores.push_back(std::move(t));
    }
    return scores;
}

ScoreSet score_examples_gaussian(const Network& net, const std::vector<LabeledExample>& fit_set,
                                 const std::vector<LabeledExample>& examples) {
    std::vector<std::vector<double>> genuine, spoof;
    for (const LabeledExample& ex : fit_set) {
        auto embs = utterance_embeddings(net, ex.splits);
        auto& dst = ex.label == 1 ? genuine : spoof;
        for (auto& e : embs) dst.push_back(std::move(e));
    }
    const GaussianBackend backend = fit_gaussian_backend(genuine, spoof);

    ScoreSet scores;
    scores.reserve(examples.size());
    for (const LabeledExample& ex : examples) {
        const auto embs = utterance_embeddings(net, ex.splits);
        double acc = 0.0;
        for (const auto& e : embs) acc += gaussian_llr(backend, e);
        TrialScore t;
        t.utt_id = ex.utt_id;
        t.score = acc / static_cast<double>(embs.size());
        t.label = ex.label;
        scores.push_back(std::move(t));
    }
    return scores;
}

}  // namespace spoofdet
