#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spoofdet/corpus.hpp"
#include "spoofdet/features.hpp"
#include "spoofdet/scoring.hpp"
#include "spoofdet/trainer.hpp"

namespace spoofdet {

// Everything needed to turn one waveform into model inputs.
struct FeatureParams {
    SpectrogramConfig spectrogram;
    bool split_mode = true;      // split windows vs one fixed-length spectrogram
    SplitConfig split;
    double single_seconds = 3.0;
    bool trim_zeros = false;

    void validate() const;
};

// pad/fix-length -> spectrogram -> (normalize) -> split
std::vector<Spectrogram> featurize_waveform(const Waveform& w, const FeatureParams& params,
                                            const NormStats* norm);

// Full (pre-split) spectrogram after the length policy; the thing norm
// stats are fitted on.
Spectrogram utterance_spectrogram(const Waveform& w, const FeatureParams& params);

NormStats fit_norm_from_manifest(const std::vector<ProtocolEntry>& entries,
                                 const std::filesystem::path& audio_root,
                                 const FeatureParams& params);

// Writes one "<id minus .wav>.spg" cache per utterance into out_dir.
void featurize_manifest(const std::vector<ProtocolEntry>& entries,
                        const std::filesystem::path& audio_root, const FeatureParams& params,
                        const NormStats* norm, const std::filesystem::path& out_dir);

std::filesystem::path cache_path(const std::filesystem::path& dir, const std::string& file_id);

// Loads SPG1 caches for every manifest entry as labeled training examples.
std::vector<LabeledExample> load_examples(const std::vector<ProtocolEntry>& entries,
                                          const std::filesystem::path& cache_dir);

// Featurizes straight from audio, skipping the on-disk cache (sweeps).
std::vector<LabeledExample> featurize_examples(const std::vector<ProtocolEntry>& entries,
                                               const std::filesystem::path& audio_root,
                                               const FeatureParams& params, const NormStats* norm);

// Mean-LLR scores per utterance, in manifest order, labels carried over.
ScoreSet score_examples(const Network& net, const std::vector<LabeledExample>& examples);

// Gaussian-backend scores: fit on the fit set's per-split embeddings, then
// score each example by its mean per-split gaussian LLR.
ScoreSet score_examples_gaussian(const Network& net, const std::vector<LabeledExample>& fit_set,
                                 const std::vector<LabeledExample>& examples);

}  // namespace spoofdet
