#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "spoofdet/tensor.hpp"

namespace spoofdet {

enum class LayerKind { conv, maxpool, activation, flatten, dropout, linear };
enum class ActivationKind { mfm, relu, elu, identity };

struct LayerSpec {
    LayerKind kind;

    // conv
    std::size_t filters = 0;
    std::size_t kernel_h = 1;
    std::size_t kernel_w = 1;
    nn::Padding padding = nn::Padding::same;
    bool bias = true;  // conv and linear

    // maxpool
    nn::Pool2d pool;

    // activation
    ActivationKind act = ActivationKind::mfm;
    double elu_alpha = 1.0;

    // dropout
    double rate = 0.0;

    // linear
    std::size_t width = 0;

    static LayerSpec make_conv(std::size_t filters, std::size_t kh, std::size_t kw,
                               nn::Padding pad = nn::Padding::same, bool bias = true);
    static LayerSpec make_pool(std::size_t k = 3, std::size_t s = 3, bool ceil = true);
    static LayerSpec make_activation(ActivationKind a, double alpha = 1.0);
    static LayerSpec make_flatten();
    static LayerSpec make_dropout(double rate);
    static LayerSpec make_linear(std::size_t width, bool bias);
};

// Declarative layer list plus the input plane it expects. The default
// factory below realizes the compact three-conv MFM network.
struct ModelConfig {
    std::size_t in_channels = 1;
    std::size_t in_h = 100;  // time frames
    std::size_t in_w = 129;  // frequency bins
    std::vector<LayerSpec> layers;
    std::string class_names[2] = {"spoof", "genuine"};  // index = class id

    void validate() const;  // propagates shapes, requires final width 2
};

// Shape of the data flowing out of each layer: {C,H,W} before flatten,
// {D} after. Throws with the offending layer index on bad propagation.
std::vector<std::pair<std::string, nn::Shape>> shape_trace(const ModelConfig& config);

std::size_t count_params(const ModelConfig& config);

// The compact detector: three conv(16, 1x9, same) blocks, each followed by
// the chosen activation and a 3x3/3x3 ceil-mode max pool, then
// flatten -> dropout(0.5) -> linear(32, no bias) -> linear(2, bias).
// With mfm this lands on 7682 trainable parameters.
ModelConfig model3_default(std::size_t in_h = 100, std::size_t in_w = 129,
                           ActivationKind act = ActivationKind::mfm);

struct Network {
    ModelConfig config;
    std::vector<std::string> param_names;
    std::vector<nn::Tensor> params;
    std::uint64_t init_seed = 0;
};

// Xavier weights, zero biases, deterministic per seed.
Network build(const ModelConfig& config, std::uint64_t seed);

std::size_t count_params(const Network& net);

struct ForwardResult {
    nn::Var logits;
    nn::Var embedding;  // output of the first linear layer, if any
};

// Runs the layer stack over batch [N,C,T,F]. Dropout fires only in
// training mode and draws from rng; rng may be null otherwise.
ForwardResult forward(const Network& net, const nn::Tensor& batch, bool training,
                      Rng* rng = nullptr);

// Graph-building variant used by the trainer: parameters come in as live
// autograd variables so gradients can be read back.
ForwardResult forward_graph(const ModelConfig& config, const std::vector<nn::Var>& params,
                            const nn::Var& batch, bool training, Rng* rng);

// Plain-text layer-per-line config format; round-trips losslessly.
std::string config_to_text(const ModelConfig& config);
ModelConfig config_from_text(const std::string& text);
void save_config(const std::filesystem::path& path, const ModelConfig& config);
ModelConfig load_config(const std::filesystem::path& path);

// Checkpoint: magic "CKPT", u32 count, then per parameter
// {u32 name_len, name, u32 rank, u32 extents[rank], f64 data[]},
// followed by the Adam state in the same layout (u32 step_count, then
// "<name>.m" and "<name>.v" entries per parameter).
void save_checkpoint(const std::filesystem::path& path, const Network& net,
                     const nn::AdamState& state);
struct Checkpoint {
    std::vector<std::string> names;
    std::vector<nn::Tensor> params;
    nn::AdamState state;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Installs checkpoint parameters into a freshly built network; throws on
// name or shape mismatch.
void restore_params(Network& net, const Checkpoint& ckpt);

}  // namespace spoofdet
