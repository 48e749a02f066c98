#include "spoofdet/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace spoofdet {

void TrainConfig::validate() const {
    if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
    if (max_epochs == 0) throw std::invalid_argument("max_epochs must be >= 1");
    if (patience == 0 || patience > max_epochs)
        throw std::invalid_argument("patience must be in [1, max_epochs]");
    adam.validate();
}

bool EarlyStopping::observe(double loss) {
    if (loss < best_) {
        best_ = loss;
        since_best_ = 0;
        return true;
    }
    ++since_best_;
    return false;
}

namespace {

struct SampleRef {
    const nn::Tensor* split;
    int label;
};

nn::Tensor stack_batch(const std::vector<SampleRef>& samples, std::size_t from, std::size_t to) {
    const nn::Tensor& first = *samples[from].split;
    if (first.rank() != 2)
        throw std::invalid_argument("split tensors must be [T,F], got " + nn::shape_str(first.shape));
    const std::size_t t = first.shape[0], f = first.shape[1];
    nn::Tensor batch({to - from, 1, t, f});
    for (std::size_t i = from; i < to; ++i) {
        const nn::Tensor& s = *samples[i].split;
        if (s.shape[0] != t || s.shape[1] != f)
            throw std::invalid_argument("all splits must share one shape; got " +
                                        nn::shape_str(s.shape) + " vs " + nn::shape_str(first.shape));
        std::copy(s.data.begin(), s.data.end(), batch.data.begin() + (i - from) * t * f);
    }
    return batch;
}

}  // namespace

std::vector<Batch> make_batches(const std::vector<LabeledExample>& examples,
                                std::size_t batch_size, Rng& rng) {
    if (examples.empty()) throw std::invalid_argument("make_batches: no examples");
    if (batch_size == 0) throw std::invalid_argument("make_batches: batch_size must be >= 1");

    std::vector<SampleRef> samples;
    for (const LabeledExample& ex : examples) {
        if (ex.splits.empty())
            throw std::invalid_argument("make_batches: utterance " + ex.utt_id + " has no splits");
        if (ex.label != 0 && ex.label != 1)
            throw std::invalid_argument("make_batches: bad label for " + ex.utt_id);
        for (const nn::Tensor& s : ex.splits) samples.push_back({&s, ex.label});
    }
    shuffle(samples, rng);

    std::vector<Batch> batches;
    for (std::size_t from = 0; from < samples.size(); from += batch_size) {
        const std::size_t to = std::min(from + batch_size, samples.size());
        Batch b;
        b.input = stack_batch(samples, from, to);
        b.labels.reserve(to - from);
        for (std::size_t i = from; i < to; ++i) b.labels.push_back(samples[i].label);
        batches.push_back(std::move(b));
    }
    return batches;
}

double run_epoch(Network& net, nn::AdamState& state, const std::vector<Batch>& batches,
                 const nn::AdamHyper& hyper, Rng& dropout_rng) {
    if (batches.empty()) throw std::invalid_argument("run_epoch: no batches");

    double loss_sum = 0.0;
    std::size_t sample_count = 0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
        const Batch& batch = batches[bi];

        std::vector<nn::Var> pvars;
        pvars.reserve(net.params.size());
        for (const nn::Tensor& p : net.params) pvars.push_back(nn::parameter(p));

        ForwardResult fw =
            forward_graph(net.config, pvars, nn::constant(batch.input), true, &dropout_rng);
        nn::Var loss = nn::softmax_cross_entropy(fw.logits, batch.labels);
        const double loss_value = loss->value[0];
        if (!std::isfinite(loss_value))
            throw std::runtime_error("run_epoch: non-finite loss at batch " + std::to_string(bi));
        nn::backward(loss);

        std::vector<nn::Tensor*> params;
        std::vector<const nn::Tensor*> grads;
        params.reserve(pvars.size());
        grads.reserve(pvars.size());
        for (std::size_t i = 0; i < pvars.size(); ++i) {
            params.push_back(&net.params[i]);
            grads.push_back(&pvars[i]->ensure_grad());
        }
        nn::adam_step(params, grads, state, hyper);

        loss_sum += loss_value * static_cast<double>(batch.labels.size());
        sample_count += batch.labels.size();
    }
    return loss_sum / static_cast<double>(sample_count);
}

double evaluate_loss(const Network& net, const std::vector<LabeledExample>& examples) {
    if (examples.empty()) throw std::invalid_argument("evaluate_loss: no examples");

    // Fixed-size chunks in manifest order; per-sample results do not
    // depend on the chunking.
    constexpr std::size_t kChunk = 64;
    std::vector<SampleRef> samples;
    for (const LabeledExample& ex : examples)
        for (const nn::Tensor& s : ex.splits) samples.push_back({&s, ex.label});
    if (samples.empty()) throw std::invalid_argument("evaluate_loss: no splits");

    double loss_sum = 0.0;
    for (std::size_t from = 0; from < samples.size(); from += kChunk) {
        const std::size_t to = std::min(from + kChunk, samples.size());
        nn::Tensor input = stack_batch(samples, from, to);
        std::vector<int> labels;
        labels.reserve(to - from);
        for (std::size_t i = from; i < to; ++i) labels.push_back(samples[i].label);
        ForwardResult fw = forward(net, input, false, nullptr);
        auto [loss, grad] = nn::softmax_cross_entropy_value(fw.logits->value, labels);
        if (!std::isfinite(loss)) throw std::runtime_error("evaluate_loss: non-finite loss");
        loss_sum += loss * static_cast<double>(to - from);
    }
    return loss_sum / static_cast<double>(samples.size());
}

TrainResult train(const Network& initial, const std::vector<LabeledExample>& train_set,
                  const std::vector<LabeledExample>& dev_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty() || dev_set.empty())
        throw std::invalid_argument("train: training and validation sets must be non-empty");

    TrainResult result;
    Network net = initial;
    nn::AdamState state = nn::AdamState::like(net.params);
    EarlyStopping stopper(cfg.patience);
    result.best = net;
    result.best_state = state;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng shuffle_rng(mix_seed(cfg.seed, "shuffle", epoch));
        Rng dropout_rng(mix_seed(cfg.seed, "dropout", epoch));

        auto batches = make_batches(train_set, cfg.batch_size, shuffle_rng);
        const double train_loss = run_epoch(net, state, batches, cfg.adam, dropout_rng);
        const double dev_loss = evaluate_loss(net, dev_set);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.logs.push_back({epoch, train_loss, dev_loss, seconds});

        if (stopper.observe(dev_loss)) {
            result.best = net;
            result.best_state = state;
            result.best_epoch = epoch;
            if (!cfg.checkpoint_path.empty())
                save_checkpoint(cfg.checkpoint_path, result.best, result.best_state);
        }
        if (stopper.should_stop()) break;
    }
    return result;
}

void write_epoch_log(const std::filesystem::path& path, const std::vector<EpochLog>& logs) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write epoch log: " + path.string());
    char line[160];
    for (const EpochLog& l : logs) {
        std::snprintf(line, sizeof(line), "%zu\t%.9g\t%.9g\t%.3f\n", l.epoch, l.train_loss,
                      l.dev_loss, l.seconds);
        os << line;
    }
}

}  // namespace spoofdet
