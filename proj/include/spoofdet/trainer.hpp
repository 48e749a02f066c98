#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spoofdet/model.hpp"

namespace spoofdet {

// One utterance: every split carries the utterance's label and becomes an
// independent training sample.
struct LabeledExample {
    std::string utt_id;
    std::vector<nn::Tensor> splits;  // each [T,F]
    int label = 0;                   // genuine = 1, spoofed = 0
};

struct TrainConfig {
    std::size_t batch_size = 32;
    std::size_t max_epochs = 300;
    std::size_t patience = 30;
    nn::AdamHyper adam;
    std::uint64_t seed = 1;
    std::string checkpoint_path;  // best snapshot written here when set

    void validate() const;
};

struct EpochLog {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double dev_loss = 0.0;
    double seconds = 0.0;
};

struct Batch {
    nn::Tensor input;  // [N,1,T,F]
    std::vector<int> labels;
};

// Tracks the best validation loss; stop after `patience` consecutive
// epochs without strict improvement.
class EarlyStopping {
  public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    // Returns true when this loss strictly improves on the best so far.
    bool observe(double loss);
    bool should_stop() const { return since_best_ >= patience_; }
    double best() const { return best_; }

  private:
    std::size_t patience_;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t since_best_ = 0;
};

// Flattens utterances into split-level samples, shuffles them with the
// given rng, and packs batches; the final short batch is kept.
std::vector<Batch> make_batches(const std::vector<LabeledExample>& examples,
                                std::size_t batch_size, Rng& rng);

// One pass over the batches: forward with dropout, backward, one Adam step
// per batch. Returns the sample-weighted mean training loss.
double run_epoch(Network& net, nn::AdamState& state, const std::vector<Batch>& batches,
                 const nn::AdamHyper& hyper, Rng& dropout_rng);

// Inference-mode mean cross-entropy over all splits of all examples.
double evaluate_loss(const Network& net, const std::vector<LabeledExample>& examples);

struct TrainResult {
    Network best;
    nn::AdamState best_state;
    std::vector<EpochLog> logs;
    std::size_t best_epoch = 0;  // 1-based
};

TrainResult train(const Network& initial, const std::vector<LabeledExample>& train_set,
                  const std::vector<LabeledExample>& dev_set, const TrainConfig& cfg);

// Epoch log file: one line per epoch, `epoch<TAB>train<TAB>dev<TAB>seconds`.
void write_epoch_log(const std::filesystem::path& path, const std::vector<EpochLog>& logs);

}  // namespace spoofdet
