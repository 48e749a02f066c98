#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spoofdet/model.hpp"

namespace spoofdet {

// Higher score means more genuine.
struct TrialScore {
    std::string utt_id;
    double score = 0.0;
    std::optional<int> label;  // genuine = 1, spoof = 0
};

using ScoreSet = std::vector<TrialScore>;

// ln(p/(1-p)) with p clamped to [1e-12, 1-1e-12]; for a two-class softmax
// this equals logit_genuine - logit_spoofed.
double posterior_to_llr(double p_genuine);

// Mean of the per-split LLRs in inference mode.
double score_utterance(const Network& net, const std::vector<nn::Tensor>& splits);

// Per-split 32-d embeddings (first linear layer output, inference mode).
std::vector<std::vector<double>> utterance_embeddings(const Network& net,
                                                      const std::vector<nn::Tensor>& splits);

enum class EerMethod { rocch, interpolated };

// rocch: crossing of the ROC convex hull (pool-adjacent-violators
// construction) with P_miss = P_fa. interpolated: linear interpolation of
// the empirical miss/false-alarm curves across thresholds.
double eer(const std::vector<double>& genuine_scores, const std::vector<double>& spoof_scores,
           EerMethod method = EerMethod::rocch);
double eer(const ScoreSet& scores, EerMethod method = EerMethod::rocch);

// One diagonal Gaussian per class over fixed-dimension embeddings.
struct GaussianBackend {
    std::size_t dim = 0;
    std::vector<double> mean_genuine, var_genuine;
    std::vector<double> mean_spoof, var_spoof;
};

// Maximum-likelihood mean and diagonal variance per class; variances
// floored at 1e-6. Each class needs at least two samples.
GaussianBackend fit_gaussian_backend(const std::vector<std::vector<double>>& genuine,
                                     const std::vector<std::vector<double>>& spoof);

// ln N(x; mu_gen, var_gen) - ln N(x; mu_spoof, var_spoof)
double gaussian_llr(const GaussianBackend& backend, std::span<const double> x);

// Score file: one trial per line, `utt<TAB>score` or
// `utt<TAB>label<TAB>score` with label in {genuine, spoof}.
ScoreSet read_scores(const std::filesystem::path& path);
void write_scores(const ScoreSet& scores, const std::filesystem::path& path);

}  // namespace spoofdet
