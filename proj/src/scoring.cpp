#include "spoofdet/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spoofdet {

double posterior_to_llr(double p_genuine) {
    const double p = std::clamp(p_genuine, 1e-12, 1.0 - 1e-12);
    return std::log(p / (1.0 - p));
}

namespace {

nn::Tensor stack_splits(const std::vector<nn::Tensor>& splits) {
    if (splits.empty()) throw std::invalid_argument("utterance has no splits");
    const std::size_t t = splits[0].shape[0], f = splits[0].shape[1];
    nn::Tensor batch({splits.size(), 1, t, f});
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (splits[i].rank() != 2 || splits[i].shape[0] != t || splits[i].shape[1] != f)
            throw std::invalid_argument("splits must share one [T,F] shape");
        std::copy(splits[i].data.begin(), splits[i].data.end(), batch.data.begin() + i * t * f);
    }
    return batch;
}

}  // namespace

double score_utterance(const Network& net, const std::vector<nn::Tensor>& splits) {
    const nn::Tensor batch = stack_splits(splits);
    ForwardResult fw = forward(net, batch, false, nullptr);
    if (fw.logits->value.shape[1] != 2)
        throw std::invalid_argument("score_utterance expects two-class logits");
    const nn::Tensor probs = nn::softmax_rows(fw.logits->value);
    const std::size_t n = probs.shape[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += posterior_to_llr(probs[i * 2 + 1]);
    return acc / static_cast<double>(n);
}

std::vector<std::vector<double>> utterance_embeddings(const Network& net,
                                                      const std::vector<nn::Tensor>& splits) {
    const nn::Tensor batch = stack_splits(splits);
    ForwardResult fw = forward(net, batch, false, nullptr);
    if (!fw.embedding) throw std::runtime_error("model has no linear layer to tap embeddings from");
    const nn::Tensor& e = fw.embedding->value;
    const std::size_t n = e.shape[0], d = e.shape[1];
    std::vector<std::vector<double>> out(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        std::copy(e.data.begin() + i * d, e.data.begin() + (i + 1) * d, out[i].begin());
    return out;
}

namespace {

struct RatePoint {
    double miss;
    double fa;
};

void check_classes(const std::vector<double>& genuine, const std::vector<double>& spoof) {
    if (genuine.empty() || spoof.empty())
        throw std::invalid_argument("eer needs at least one genuine and one spoofed trial");
    for (double s : genuine)
        if (!std::isfinite(s)) throw std::invalid_argument("eer: non-finite genuine score");
    for (double s : spoof)
        if (!std::isfinite(s)) throw std::invalid_argument("eer: non-finite spoof score");
}

// Crossing of the polyline through `points` (miss - fa nondecreasing) with
// the diagonal miss == fa.
double diagonal_crossing(const std::vector<RatePoint>& points) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = points[i].miss - points[i].fa;
        if (d >= 0.0) {
            if (d == 0.0 || i == 0) return points[i].miss;
            const RatePoint& a = points[i - 1];
            const RatePoint& b = points[i];
            const double denom = (b.miss - a.miss) - (b.fa - a.fa);
            const double t = (a.fa - a.miss) / denom;
            return a.miss + t * (b.miss - a.miss);
        }
    }
    return points.back().miss;  // unreachable for valid inputs
}

double eer_interpolated(std::vector<double> genuine, std::vector<double> spoof) {
    std::sort(genuine.begin(), genuine.end());
    std::sort(spoof.begin(), spoof.end());
    const double g_total = static_cast<double>(genuine.size());
    const double s_total = static_cast<double>(spoof.size());

    // distinct thresholds over the union of scores, ascending
    std::vector<double> thresholds;
    thresholds.reserve(genuine.size() + spoof.size());
    std::merge(genuine.begin(), genuine.end(), spoof.begin(), spoof.end(),
               std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    // accept when score >= threshold: miss = P(g < t), fa = P(s >= t)
    std::vector<RatePoint> points;
    points.reserve(thresholds.size() + 1);
    std::size_t g_below = 0, s_below = 0;
    for (double t : thresholds) {
        while (g_below < genuine.size() && genuine[g_below] < t) ++g_below;
        while (s_below < spoof.size() && spoof[s_below] < t) ++s_below;
        points.push_back({static_cast<double>(g_below) / g_total,
                          (s_total - static_cast<double>(s_below)) / s_total});
    }
    points.push_back({1.0, 0.0});
    return diagonal_crossing(points);
}

double eer_rocch(const std::vector<double>& genuine, const std::vector<double>& spoof) {
    // group trials by exact score so ties can never be separated
    std::map<double, std::pair<std::size_t, std::size_t>> groups;  // score -> (genuine, spoof)
    for (double s : genuine) groups[s].first++;
    for (double s : spoof) groups[s].second++;

    // pool adjacent violators on the genuine fraction, ascending in score;
    // the block boundaries are the hull vertices
    struct Block {
        double g;
        double total;
    };
    std::vector<Block> blocks;
    blocks.reserve(groups.size());
    for (const auto& [score, counts] : groups) {
        Block b{static_cast<double>(counts.first),
                static_cast<double>(counts.first + counts.second)};
        blocks.push_back(b);
        while (blocks.size() >= 2) {
            const Block& prev = blocks[blocks.size() - 2];
            const Block& cur = blocks.back();
            if (prev.g * cur.total > cur.g * prev.total) {  // prev mean > cur mean
                Block merged{prev.g + cur.g, prev.total + cur.total};
                blocks.pop_back();
                blocks.back() = merged;
            } else {
                break;
            }
        }
    }

    const double g_total = static_cast<double>(genuine.size());
    const double s_total = static_cast<double>(spoof.size());
    std::vector<RatePoint> vertices;
    vertices.reserve(blocks.size() + 1);
    vertices.push_back({0.0, 1.0});
    double cum_g = 0.0, cum_s = 0.0;
    for (const Block& b : blocks) {
        cum_g += b.g;
        cum_s += b.total - b.g;
        vertices.push_back({cum_g / g_total, (s_total - cum_s) / s_total});
    }
    return diagonal_crossing(vertices);
}

}  // namespace

double eer(const std::vector<double>& genuine_scores, const std::vector<double>& spoof_scores,
           EerMethod method) {
    check_classes(genuine_scores, spoof_scores);
    return method == EerMethod::rocch ? eer_rocch(genuine_scores, spoof_scores)
                                      : eer_interpolated(genuine_scores, spoof_scores);
}

double eer(const ScoreSet& scores, EerMethod method) {
    std::vector<double> genuine, spoof;
    for (const TrialScore& t : scores) {
        if (!t.label)
            throw std::invalid_argument("eer: trial " + t.utt_id + " has no label");
        (*t.label == 1 ? genuine : spoof).push_back(t.score);
    }
    return eer(genuine, spoof, method);
}

GaussianBackend fit_gaussian_backend(const std::vector<std::vector<double>>& genuine,
                                     const std::vector<std::vector<double>>& spoof) {
    if (genuine.size() < 2 || spoof.size() < 2)
        throw std::invalid_argument("gaussian backend needs at least two samples per class");
    const std::size_t dim = genuine[0].size();
    if (dim == 0) throw std::invalid_argument("gaussian backend: empty embeddings");

    auto fit_class = [dim](const std::vector<std::vector<double>>& data,
                           std::vector<double>& mean, std::vector<double>& var) {
        mean.assign(dim, 0.0);
        var.assign(dim, 0.0);
        for (const auto& x : data) {
            if (x.size() != dim)
                throw std::invalid_argument("gaussian backend: inconsistent embedding dimension");
            for (std::size_t j = 0; j < dim; ++j) mean[j] += x[j];
        }
        for (std::size_t j = 0; j < dim; ++j) mean[j] /= static_cast<double>(data.size());
        for (const auto& x : data)
            for (std::size_t j = 0; j < dim; ++j) {
                const double d = x[j] - mean[j];
                var[j] += d * d;
            }
        for (std::size_t j = 0; j < dim; ++j)
            var[j] = std::max(var[j] / static_cast<double>(data.size()), 1e-6);
    };

    GaussianBackend b;
    b.dim = dim;
    fit_class(genuine, b.mean_genuine, b.var_genuine);
    fit_class(spoof, b.mean_spoof, b.var_spoof);
    return b;
}

double gaussian_llr(const GaussianBackend& backend, std::span<const double> x) {
    if (x.size() != backend.dim)
        throw std::invalid_argument("gaussian_llr: embedding dimension " + std::to_string(x.size()) +
                                    " does not match backend dimension " +
                                    std::to_string(backend.dim));
    double llr = 0.0;
    for (std::size_t j = 0; j < backend.dim; ++j) {
        const double dg = x[j] - backend.mean_genuine[j];
        const double ds = x[j] - backend.mean_spoof[j];
        llr += -0.5 * std::log(2.0 * std::numbers::pi * backend.var_genuine[j]) -
               dg * dg / (2.0 * backend.var_genuine[j]);
        llr -= -0.5 * std::log(2.0 * std::numbers::pi * backend.var_spoof[j]) -
               ds * ds / (2.0 * backend.var_spoof[j]);
    }
    return llr;
}

ScoreSet read_scores(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open score file: " + path.string());
    ScoreSet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error("score file " + path.string() + " line " +
                                     std::to_string(line_no) + ": " + why);
        };
        if (tok.size() != 2 && tok.size() != 3) fail("expected 2 or 3 fields");
        TrialScore ts;
        ts.utt_id = tok[0];
        if (tok.size() == 3) {
            std::string lab = tok[1];
            for (char& c : lab) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (lab == "genuine") ts.label = 1;
            else if (lab == "spoof") ts.label = 0;
            else fail("unknown label '" + tok[1] + "'");
        }
        try {
            std::size_t used = 0;
            ts.score = std::stod(tok.back(), &used);
            if (used != tok.back().size()) fail("malformed score '" + tok.back() + "'");
        } catch (const std::logic_error&) {
            fail("malformed score '" + tok.back() + "'");
        }
        if (!std::isfinite(ts.score)) fail("non-finite score");
        out.push_back(std::move(ts));
    }
    return out;
}

void write_scores(const ScoreSet& scores, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write score file: " + path.string());
    char buf[64];
    for (const TrialScore& t : scores) {
        std::snprintf(buf, sizeof(buf), "%.9g", t.score);
        if (t.label)
            os << t.utt_id << '\t' << (*t.label == 1 ? "genuine" : "spoof") << '\t' << buf << '\n';
        else
            os << t.utt_id << '\t' << buf << '\n';
    }
    if (!os) throw std::runtime_error("short write: " + path.string());
}

}  // namespace spoofdet
