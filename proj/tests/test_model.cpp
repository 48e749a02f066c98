#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "spoofdet/model.hpp"

using namespace spoofdet;
using nn::Shape;
using nn::Tensor;

namespace {

Tensor random_batch(Shape shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    Rng rng(seed);
    for (double& v : t.data) v = uniform(rng, -1.0, 1.0);
    return t;
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "spoofdet_model_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("the default compact model has exactly 7682 parameters") {
    ModelConfig cfg = model3_default();
    CHECK(count_params(cfg) == 7682);
    Network net = build(cfg, 1);
    CHECK(count_params(net) == 7682);
}

TEST_CASE("count_params on small configs") {
    ModelConfig tiny;
    tiny.in_channels = 1;
    tiny.in_h = 1;
    tiny.in_w = 2;
    tiny.layers = {LayerSpec::make_flatten(), LayerSpec::make_linear(2, true)};
    CHECK(count_params(tiny) == 6);  // 2x2 weight + 2 bias

    ModelConfig conv_only;
    conv_only.in_channels = 1;
    conv_only.in_h = 4;
    conv_only.in_w = 16;
    conv_only.layers = {LayerSpec::make_conv(16, 1, 9)};
    CHECK(count_params(conv_only) == 160);  // 16*9 + 16
}

TEST_CASE("shape trace walks the documented pyramid") {
    ModelConfig cfg = model3_default();
    auto trace = shape_trace(cfg);
    REQUIRE(trace.size() == cfg.layers.size() + 1);
    CHECK(trace[0].second == Shape{1, 100, 129});
    CHECK(trace[1].second == Shape{16, 100, 129});  // conv1
    CHECK(trace[2].second == Shape{8, 100, 129});   // mfm halves channels
    CHECK(trace[3].second == Shape{8, 34, 43});     // pool1, ceil mode
    CHECK(trace[5].second == Shape{8, 34, 43});     // mfm after conv2
    CHECK(trace[6].second == Shape{8, 12, 15});     // pool2
    CHECK(trace[9].second == Shape{8, 4, 5});       // pool3
    CHECK(trace[10].second == Shape{160});          // flatten = 8*4*5
    CHECK(trace[12].second == Shape{32});           // fc1
    CHECK(trace.back().second == Shape{2});

    // every mfm halves the channel axis: 16 -> 8 at each stage
    for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        if (trace[i + 1].first == "mfm") CHECK(trace[i + 1].second[0] * 2 == trace[i].second[0]);
}

TEST_CASE("shape trace reports the offending layer on failure") {
    ModelConfig bad;
    bad.in_channels = 3;  // odd channels into mfm
    bad.in_h = 4;
    bad.in_w = 4;
    bad.layers = {LayerSpec::make_activation(ActivationKind::mfm), LayerSpec::make_flatten(),
                  LayerSpec::make_linear(2, true)};
    bool threw = false;
    try {
        shape_trace(bad);
    } catch (const std::invalid_argument& e) {
        threw = true;
        CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
    }
    CHECK(threw);

    ModelConfig not_two = model3_default();
    not_two.layers.back() = LayerSpec::make_linear(3, true);
    CHECK_THROWS(not_two.validate());
}

TEST_CASE("relu and elu variants keep the full channel count") {
    ModelConfig cfg = model3_default(100, 129, ActivationKind::relu);
    auto trace = shape_trace(cfg);
    CHECK(trace[2].second == Shape{16, 100, 129});
    CHECK(count_params(cfg) != 7682);  // wider flatten, more fc1 weights
    cfg.validate();
}

TEST_CASE("build is deterministic and zero-initializes biases") {
    ModelConfig cfg = model3_default();
    Network a = build(cfg, 42);
    Network b = build(cfg, 42);
    REQUIRE(a.params.size() == 9);  // 3 conv w + 3 conv b + fc1 w + fc2 w + fc2 b
    CHECK(a.param_names ==
          std::vector<std::string>{"conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias",
                                   "conv3.weight", "conv3.bias", "fc1.weight", "fc2.weight",
                                   "fc2.bias"});
    for (std::size_t i = 0; i < a.params.size(); ++i) CHECK(a.params[i].data == b.params[i].data);

    Network c = build(cfg, 43);
    CHECK(a.params[0].data != c.params[0].data);

    for (std::size_t i = 0; i < a.params.size(); ++i)
        if (a.param_names[i].ends_with(".bias"))
            for (double v : a.params[i].data) CHECK(v == 0.0);
}

TEST_CASE("forward of a zero-output network is maximally uncertain") {
    ModelConfig cfg = model3_default(20, 17);
    Network net = build(cfg, 3);
    net.params[7] = Tensor::zeros(net.params[7].shape);  // fc2.weight
    net.params[8] = Tensor::zeros(net.params[8].shape);  // fc2.bias
    Tensor batch = random_batch({3, 1, 20, 17}, 5);
    ForwardResult fw = forward(net, batch, false);
    for (double v : fw.logits->value.data) CHECK(v == 0.0);
    Tensor p = nn::softmax_rows(fw.logits->value);
    for (double v : p.data) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("forward treats batch rows independently") {
    ModelConfig cfg = model3_default(20, 17);
    Network net = build(cfg, 7);
    Tensor row = random_batch({1, 1, 20, 17}, 8);
    Tensor batch({4, 1, 20, 17});
    for (int i = 0; i < 4; ++i)
        std::copy(row.data.begin(), row.data.end(), batch.data.begin() + i * row.numel());
    ForwardResult fw = forward(net, batch, false);
    for (int i = 1; i < 4; ++i) {
        CHECK(fw.logits->value[2 * i] == fw.logits->value[0]);
        CHECK(fw.logits->value[2 * i + 1] == fw.logits->value[1]);
    }
}

TEST_CASE("forward is permutation-equivariant over the batch") {
    ModelConfig cfg = model3_default(20, 17);
    Network net = build(cfg, 9);
    Tensor batch = random_batch({3, 1, 20, 17}, 10);
    Tensor swapped = batch;
    // swap rows 0 and 2
    const std::size_t stride = 20 * 17;
    for (std::size_t i = 0; i < stride; ++i)
        std::swap(swapped.data[i], swapped.data[2 * stride + i]);
    Tensor a = forward(net, batch, false).logits->value;
    Tensor b = forward(net, swapped, false).logits->value;
    CHECK(a[0] == b[4]);
    CHECK(a[1] == b[5]);
    CHECK(a[2] == b[2]);
    CHECK(a[4] == b[0]);
}

TEST_CASE("inference-mode forward is a pure function") {
    ModelConfig cfg = model3_default(20, 17);
    Network net = build(cfg, 11);
    Tensor batch = random_batch({2, 1, 20, 17}, 12);
    Tensor a = forward(net, batch, false).logits->value;
    Tensor b = forward(net, batch, false).logits->value;
    CHECK(a.data == b.data);
    CHECK_THROWS(forward(net, random_batch({2, 1, 21, 17}, 13), false));
}

TEST_CASE("full compact-model loss passes the finite-difference check") {
    ModelConfig cfg = model3_default();
    Network net = build(cfg, 21);
    Tensor batch = random_batch({2, 1, 100, 129}, 22);
    const std::vector<int> labels = {1, 0};

    // Conv parameters move every pool/mfm comparison downstream, so their
    // step must sit below the spacing of competing values or the quotient
    // straddles an argmax flip; their gradients are large enough that the
    // tiny step stays above the rounding floor. The fully connected tail
    // cannot move any comparison and keeps the default step.
    for (std::size_t pi = 0; pi < net.params.size(); ++pi) {
        const bool kink_adjacent = net.param_names[pi].starts_with("conv");
        auto f = [&](const nn::Var& v) {
            std::vector<nn::Var> params;
            for (std::size_t j = 0; j < net.params.size(); ++j)
                params.push_back(j == pi ? v : nn::constant(net.params[j]));
            ForwardResult fw = forward_graph(net.config, params, nn::constant(batch), false, nullptr);
            return nn::softmax_cross_entropy(fw.logits, labels);
        };
        CHECK(nn::grad_check(f, net.params[pi], kink_adjacent ? 1e-8 : 1e-4, 6, 1000 + pi) < 1e-4);
    }
}

TEST_CASE("config text round trip") {
    ModelConfig cfg = model3_default(300, 129, ActivationKind::elu);
    cfg.layers[1].elu_alpha = 0.75;
    const std::string text = config_to_text(cfg);
    ModelConfig back = config_from_text(text);
    CHECK(config_to_text(back) == text);
    CHECK(back.in_h == 300);
    CHECK(back.layers.size() == cfg.layers.size());
    CHECK(count_params(back) == count_params(cfg));

    CHECK_THROWS(config_from_text("conv filters=4 kernel=1x3 pad=same bias=yes\n"));  // no input
    CHECK_THROWS(config_from_text("input channels=1 time=4 freq=4\nwarp factor=2\n"));
}

TEST_CASE("checkpoint round trip with optimizer state") {
    ModelConfig cfg = model3_default(20, 17);
    Network net = build(cfg, 33);
    nn::AdamState state = nn::AdamState::like(net.params);
    state.step_count = 77;
    Rng rng(34);
    for (Tensor& m : state.m)
        for (double& v : m.data) v = uniform(rng, -1, 1);
    for (Tensor& v : state.v)
        for (double& x : v.data) x = uniform(rng, 0, 1);

    auto path = temp_file("net.ckpt");
    save_checkpoint(path, net, state);
    Checkpoint ckpt = load_checkpoint(path);
    CHECK(ckpt.names == net.param_names);
    CHECK(ckpt.state.step_count == 77);
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        CHECK(ckpt.params[i].data == net.params[i].data);
        CHECK(ckpt.state.m[i].data == state.m[i].data);
        CHECK(ckpt.state.v[i].data == state.v[i].data);
    }

    Network fresh = build(cfg, 99);
    restore_params(fresh, ckpt);
    for (std::size_t i = 0; i < net.params.size(); ++i)
        CHECK(fresh.params[i].data == net.params[i].data);

    Network other = build(model3_default(100, 129), 1);  // different flatten width
    CHECK_THROWS(restore_params(other, ckpt));
}
