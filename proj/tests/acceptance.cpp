// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Criteria 1, 8 and 10 drive the installed CLI binary end to end; the rest
// exercise the library against independent oracles.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "eer_oracle.hpp"
#include "spoofdet/features.hpp"
#include "spoofdet/pipeline.hpp"
#include "spoofdet/scoring.hpp"
#include "spoofdet/trainer.hpp"
#include "subprocess.hpp"

namespace fs = std::filesystem;
using namespace spoofdet;
using Clock = std::chrono::steady_clock;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    require(bool(is), "cannot open " + p.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path work_root() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "spoofdet_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

nn::Tensor random_tensor(nn::Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    nn::Tensor t(std::move(shape));
    for (double& v : t.data) v = uniform(rng, lo, hi);
    return t;
}

nn::Tensor coeffs_like(const nn::Tensor& t, std::uint64_t seed) {
    Rng rng(seed);
    return random_tensor(t.shape, rng);
}

// ---------------------------------------------------------------------
// criterion 1: the CLI reports exactly 7682 parameters for the default model

void criterion_param_count() {
    const auto t0 = Clock::now();
    auto r = subprocess::run(subprocess::cli_path() + " inspect --model model3");
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    require(r.exit_code == 0, "inspect exited with " + std::to_string(r.exit_code));
    require(r.output.find("params: 7682") != std::string::npos,
            "inspect did not print 'params: 7682'; got:\n" + r.output);
    require(secs < 1.0, "inspect took " + std::to_string(secs) + " s (limit 1 s)");
}

// ---------------------------------------------------------------------
// criterion 2: pinned spectrogram shapes

void criterion_shapes() {
    Rng rng(2);
    Waveform one_second;
    one_second.sample_rate = 16000;
    one_second.samples.resize(16000);
    for (double& s : one_second.samples) s = uniform(rng, -0.8, 0.8);

    Spectrogram a = log_power_spectrogram(one_second, {256, 256, 160, 1e-10});
    require(a.frames == 100 && a.bins == 129,
            "fft 256 gave " + std::to_string(a.frames) + "x" + std::to_string(a.bins));

    Spectrogram b = log_power_spectrogram(one_second, {512, 512, 160, 1e-10});
    require(b.frames == 100 && b.bins == 257,
            "fft 512 gave " + std::to_string(b.frames) + "x" + std::to_string(b.bins));

    Waveform stretched = fix_length(one_second, 3.0);
    Spectrogram c = log_power_spectrogram(stretched, {256, 256, 160, 1e-10});
    require(c.frames == 300 && c.bins == 129,
            "3 s single gave " + std::to_string(c.frames) + "x" + std::to_string(c.bins));
}

// ---------------------------------------------------------------------
// criterion 3: finite-difference gradient suite

void check_grad(double err, const std::string& what) {
    require(err < 1e-4, what + ": gradient error " + std::to_string(err));
}

void criterion_gradients() {
    const auto t0 = Clock::now();
    using nn::constant;
    using nn::Var;

    // randomized per-op checks; every op of the fixed set appears
    std::size_t trials = 0;
    Rng shapes(31);
    for (int round = 0; round < 7; ++round) {
        const std::size_t n = 1 + uniform_index(shapes, 2);
        const std::size_t c = 1 + uniform_index(shapes, 3);
        const std::size_t h = 3 + uniform_index(shapes, 6);
        const std::size_t w = 4 + uniform_index(shapes, 8);
        const std::size_t k = 2 * (1 + uniform_index(shapes, 3));
        const std::size_t kh = 1 + uniform_index(shapes, 2);
        const std::size_t kw = 1 + uniform_index(shapes, 4);
        Rng data(100 + round);
        nn::Tensor x = random_tensor({n, c, h, w}, data);
        nn::Tensor wt = random_tensor({k, c, kh, kw}, data);
        nn::Tensor bias = random_tensor({k}, data);

        auto conv_out = nn::conv2d(constant(x), constant(wt), constant(bias), nn::Padding::same);
        const nn::Tensor cc = coeffs_like(conv_out->value, 500 + round);
        check_grad(nn::grad_check([&](const Var& v) {
                       return nn::inner(nn::conv2d(v, constant(wt), constant(bias), nn::Padding::same), cc);
                   }, x), "conv2d/x");
        check_grad(nn::grad_check([&](const Var& v) {
                       return nn::inner(nn::conv2d(constant(x), v, constant(bias), nn::Padding::same), cc);
                   }, wt), "conv2d/w");
        check_grad(nn::grad_check([&](const Var& v) {
                       return nn::inner(nn::conv2d(constant(x), constant(wt), v, nn::Padding::same), cc);
                   }, bias), "conv2d/b");
        trials += 3;

        const bool ceil_mode = round % 2 == 0;
        auto pool_out = nn::maxpool2d(conv_out, {3, 3, 3, 3, ceil_mode ? true : false});
        const nn::Tensor pc = coeffs_like(pool_out->value, 600 + round);
        check_grad(nn::grad_check([&](const Var& v) {
                       return nn::inner(nn::maxpool2d(nn::conv2d(v, constant(wt), constant(bias),
                                                                 nn::Padding::same),
                                                      {3, 3, 3, 3, ceil_mode}),
                                        pc);
                   }, x), "maxpool chain");
        ++trials;

        nn::Tensor xm = random_tensor({n, k, h, w}, data);
        const nn::Tensor mc = coeffs_like(nn::mfm(constant(xm))->value, 700 + round);
        check_grad(nn::grad_check([&](const Var& v) { return nn::inner(nn::mfm(v), mc); }, xm),
                   "mfm");
        ++trials;

        nn::Tensor xe = random_tensor({2, 7}, data);
        for (double& v : xe.data) v += v >= 0 ? 0.3 : -0.3;  // stay off the kinks
        const nn::Tensor ec = coeffs_like(xe, 800 + round);
        check_grad(nn::grad_check([&](const Var& v) { return nn::inner(nn::relu(v), ec); }, xe),
                   "relu");
        check_grad(nn::grad_check([&](const Var& v) { return nn::inner(nn::elu(v, 0.9), ec); }, xe),
                   "elu");
        trials += 2;

        const std::size_t din = 4 + uniform_index(shapes, 12);
        const std::size_t dout = 2 + uniform_index(shapes, 8);
        nn::Tensor lx = random_tensor({n, din}, data);
        nn::Tensor lw = random_tensor({din, dout}, data);
        nn::Tensor lb = random_tensor({dout}, data);
        const nn::Tensor lc = coeffs_like(nn::Tensor::zeros({n, dout}), 900 + round);
        check_grad(nn::grad_check([&](const Var& v) {
                       return nn::inner(nn::linear(v, constant(lw), constant(lb)), lc);
                   }, lx), "linear/x");
        check_grad(nn::grad_check([&](const Var& v) {
                       return nn::inner(nn::linear(constant(lx), v, constant(lb)), lc);
                   }, lw), "linear/w");
        check_grad(nn::grad_check([&](const Var& v) {
                       return nn::inner(nn::linear(constant(lx), constant(lw), v), lc);
                   }, lb), "linear/b");
        trials += 3;

        nn::Tensor logits = random_tensor({n, 2}, data, -1.5, 1.5);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(uniform_index(data, 2));
        check_grad(nn::grad_check(
                       [&](const Var& v) { return nn::softmax_cross_entropy(v, labels); }, logits),
                   "softmax cross entropy");
        ++trials;
    }
    require(trials >= 20, "only " + std::to_string(trials) + " randomized trials");

    // the full default network, dropout off; conv parameters use a step
    // below the spacing of competing pool/mfm values, the smooth fc tail
    // keeps the default step
    Network net = build(model3_default(), 21);
    Rng data(22);
    nn::Tensor batch = random_tensor({2, 1, 100, 129}, data);
    const std::vector<int> labels = {1, 0};
    for (std::size_t pi = 0; pi < net.params.size(); ++pi) {
        auto f = [&](const Var& v) {
            std::vector<Var> params;
            for (std::size_t j = 0; j < net.params.size(); ++j)
                params.push_back(j == pi ? v : constant(net.params[j]));
            return nn::softmax_cross_entropy(
                forward_graph(net.config, params, constant(batch), false, nullptr).logits, labels);
        };
        const bool kink_adjacent = net.param_names[pi].starts_with("conv");
        check_grad(nn::grad_check(f, net.params[pi], kink_adjacent ? 1e-8 : 1e-4, 6, 4000 + pi),
                   "model3 " + net.param_names[pi]);
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    require(secs < 30.0, "gradient suite took " + std::to_string(secs) + " s (limit 30 s)");
}

// ---------------------------------------------------------------------
// criterion 4: both EER methods against brute-force oracles

void criterion_eer_oracles() {
    const auto t0 = Clock::now();
    Rng rng(41);
    auto transforms = std::vector<double (*)(double)>{
        [](double x) { return 3.0 * x + 2.0; },
        [](double x) { return x * x * x; },
        [](double x) { return std::atan(x); },
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t ng = 1 + uniform_index(rng, 25);
        const std::size_t ns = 1 + uniform_index(rng, std::min<std::uint64_t>(49 - ng, 25));
        const bool coarse = trial % 3 == 0;
        std::vector<double> genuine(ng), spoof(ns);
        for (double& v : genuine)
            v = coarse ? static_cast<double>(uniform_index(rng, 6)) : uniform(rng, -2, 4);
        for (double& v : spoof)
            v = coarse ? static_cast<double>(uniform_index(rng, 6)) : uniform(rng, -4, 2);

        const double r = eer(genuine, spoof, EerMethod::rocch);
        const double i = eer(genuine, spoof, EerMethod::interpolated);
        require(std::abs(r - eer_oracle::rocch(genuine, spoof)) < 1e-9,
                "rocch disagrees with the hull oracle at trial " + std::to_string(trial));
        require(std::abs(i - eer_oracle::interpolated(genuine, spoof)) < 1e-9,
                "interpolated disagrees with the threshold oracle at trial " + std::to_string(trial));
        require(r <= i + 1e-12, "rocch above interpolated at trial " + std::to_string(trial));

        if (trial % 10 == 0) {
            for (auto f : transforms) {
                std::vector<double> g2 = genuine, s2 = spoof;
                for (double& v : g2) v = f(v);
                for (double& v : s2) v = f(v);
                require(std::abs(eer(g2, s2, EerMethod::rocch) - r) < 1e-12,
                        "rocch not monotone-invariant at trial " + std::to_string(trial));
                require(std::abs(eer(g2, s2, EerMethod::interpolated) - i) < 1e-12,
                        "interpolated not monotone-invariant at trial " + std::to_string(trial));
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    require(secs < 30.0, "eer suite took " + std::to_string(secs) + " s (limit 30 s)");
}

// ---------------------------------------------------------------------
// criterion 5: Adam closed forms with epsilon = 0.1

void criterion_adam() {
    nn::AdamHyper hyper;  // lr 1e-4, beta1 0.9, beta2 0.999, eps 0.1
    nn::Tensor p({1}, {0.0});
    nn::Tensor g({1}, {1.0});
    std::vector<nn::Tensor*> params = {&p};
    std::vector<const nn::Tensor*> grads = {&g};
    nn::AdamState state = nn::AdamState::like({p});

    // t=1: mhat = g, vhat = g^2, step = -lr/(|g|+eps)
    nn::adam_step(params, grads, state, hyper);
    const double expect1 = -1e-4 / 1.1;
    require(std::abs(p[0] - expect1) < 1e-12,
            "single step " + std::to_string(p[0]) + " vs " + std::to_string(expect1));

    double m = 0.0, v = 0.0, pr = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = hyper.beta1 * m + (1 - hyper.beta1);
        v = hyper.beta2 * v + (1 - hyper.beta2);
        pr -= hyper.learning_rate * (m / (1 - std::pow(hyper.beta1, t))) /
              (std::sqrt(v / (1 - std::pow(hyper.beta2, t))) + hyper.epsilon);
    }
    nn::adam_step(params, grads, state, hyper);
    require(std::abs(p[0] - pr) < 1e-12, "double step drifted from the hand unroll");

    nn::Tensor pz({2}, {0.25, -0.5});
    nn::Tensor gz = nn::Tensor::zeros({2});
    std::vector<nn::Tensor*> pzs = {&pz};
    std::vector<const nn::Tensor*> gzs = {&gz};
    nn::AdamState fresh = nn::AdamState::like({pz});
    nn::adam_step(pzs, gzs, fresh, hyper);
    require(pz[0] == 0.25 && pz[1] == -0.5, "zero gradient moved parameters");
}

// ---------------------------------------------------------------------
// criterion 6: split-data law over 500 random geometries

void criterion_split_law() {
    Rng rng(61);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t wind = 1 + uniform_index(rng, 60);
        const std::size_t shift = 1 + uniform_index(rng, wind);
        const std::size_t frames = wind + uniform_index(rng, 400);
        Spectrogram spec(frames, 4);
        for (std::size_t i = 0; i < spec.values.size(); ++i)
            spec.values[i] = static_cast<double>(i);

        auto parts = split_spectrogram(spec, {wind, shift});
        require(parts.size() == (frames - wind) / shift + 1,
                "split count law failed at trial " + std::to_string(trial));
        for (std::size_t i = 0; i < parts.size(); ++i) {
            require(parts[i].frames == wind, "window height mismatch");
            for (std::size_t t = 0; t < wind; ++t)
                for (std::size_t f = 0; f < 4; ++f)
                    require(parts[i].at(t, f) == spec.at(i * shift + t, f),
                            "window content mismatch at trial " + std::to_string(trial));
        }
    }
}

// ---------------------------------------------------------------------
// criterion 7: the default model overfits one 2-sample batch

void criterion_overfit() {
    const auto t0 = Clock::now();
    ModelConfig cfg = model3_default();
    for (LayerSpec& l : cfg.layers)
        if (l.kind == LayerKind::dropout) l.rate = 0.0;
    Network net = build(cfg, 71);

    Rng data(72);
    Batch batch;
    batch.input = random_tensor({2, 1, 100, 129}, data);
    batch.labels = {1, 0};

    nn::AdamState state = nn::AdamState::like(net.params);
    nn::AdamHyper hyper;
    hyper.learning_rate = 3e-3;  // with eps 0.1 the late-stage step is ~10*lr*g
    Rng drop(73);
    double loss = 1e9;
    std::size_t steps = 0;
    for (; steps < 500; ++steps) {
        loss = run_epoch(net, state, {batch}, hyper, drop);
        if (loss < 0.01) break;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    require(loss < 0.01, "loss stuck at " + std::to_string(loss) + " after 500 steps");
    require(secs < 60.0, "overfit check took " + std::to_string(secs) + " s (limit 60 s)");
}

// ---------------------------------------------------------------------
// criterion 8: end-to-end synthetic run, twice, bit-identical

struct PipelineArtifacts {
    fs::path scores;
    std::string eer_line;
};

PipelineArtifacts run_pipeline(const fs::path& root, int run_idx) {
    const std::string cli = subprocess::cli_path();
    const fs::path dir = root / ("run" + std::to_string(run_idx));
    fs::create_directories(dir);

    auto sh = [&](const std::string& cmd) {
        auto r = subprocess::run(cmd);
        require(r.exit_code == 0, "command failed: " + cmd + "\n" + r.output);
        return r.output;
    };

    sh(cli + " synth --out " + q(dir / "corpus") +
       " --seed 94 --train-genuine 200 --train-spoof 200 --dev-genuine 100 --dev-spoof 100"
       " --min-seconds 1.0 --max-seconds 2.5");
    sh(cli + " featurize --manifest " + q(dir / "corpus/train/protocol.txt") + " --audio-root " +
       q(dir / "corpus/train") + " --out " + q(dir / "norm.bin") + " --fit-norm");
    sh(cli + " featurize --manifest " + q(dir / "corpus/train/protocol.txt") + " --audio-root " +
       q(dir / "corpus/train") + " --out " + q(dir / "feats/train") + " --norm " +
       q(dir / "norm.bin"));
    sh(cli + " featurize --manifest " + q(dir / "corpus/dev/protocol.txt") + " --audio-root " +
       q(dir / "corpus/dev") + " --out " + q(dir / "feats/dev") + " --norm " + q(dir / "norm.bin"));

    {
        std::ofstream os(dir / "exp.ini");
        os << "[paths]\n";
        os << "train_manifest = " << (dir / "corpus/train/protocol.txt").string() << "\n";
        os << "train_audio = " << (dir / "corpus/train").string() << "\n";
        os << "train_features = " << (dir / "feats/train").string() << "\n";
        os << "dev_manifest = " << (dir / "corpus/dev/protocol.txt").string() << "\n";
        os << "dev_audio = " << (dir / "corpus/dev").string() << "\n";
        os << "dev_features = " << (dir / "feats/dev").string() << "\n";
        os << "norm_stats = " << (dir / "norm.bin").string() << "\n";
        os << "out = " << (dir / "model").string() << "\n";
        os << "[train]\n";
        os << "batch_size = 32\nmax_epochs = 50\npatience = 10\n";
        os << "learning_rate = 1e-3\nseed = 9\n";
    }
    sh(cli + " train --config " + q(dir / "exp.ini"));
    sh(cli + " score --checkpoint " + q(dir / "model/checkpoint.ckpt") + " --model " +
       q(dir / "model/model.config") + " --manifest " + q(dir / "corpus/dev/protocol.txt") +
       " --features " + q(dir / "feats/dev") + " --out " + q(dir / "dev.scores"));
    std::string eer_out = sh(cli + " eer --scores " + q(dir / "dev.scores"));

    PipelineArtifacts art;
    art.scores = dir / "dev.scores";
    art.eer_line = eer_out;
    return art;
}

double parse_eer_percent(const std::string& line) {
    const auto pos = line.find("EER: ");
    require(pos != std::string::npos, "no EER line in: " + line);
    return std::stod(line.substr(pos + 5));
}

static double g_e2e_dev_eer = -1.0;
static fs::path g_run1_dir;

void criterion_end_to_end() {
    const auto t0 = Clock::now();
    const fs::path root = work_root() / "e2e";
    PipelineArtifacts a = run_pipeline(root, 1);
    PipelineArtifacts b = run_pipeline(root, 2);

    require(slurp(a.scores) == slurp(b.scores), "score files differ between identical runs");
    require(a.eer_line == b.eer_line, "EER output differs between identical runs");

    const double dev_eer = parse_eer_percent(a.eer_line);
    g_e2e_dev_eer = dev_eer;
    g_run1_dir = root / "run1";
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    require(dev_eer < 5.0, "dev EER " + std::to_string(dev_eer) + "% (limit 5%)");
    require(secs < 600.0, "pipeline took " + std::to_string(secs) + " s (limit 600 s)");
}

// ---------------------------------------------------------------------
// criterion 9: early stopping fires at exactly patience non-improvements

void criterion_early_stopping() {
    // constructed loss sequences
    {
        EarlyStopping s(3);
        s.observe(1.00);
        s.observe(1.05);
        s.observe(1.04);
        require(!s.should_stop(), "stopped one epoch early");
        s.observe(1.10);
        require(s.should_stop(), "did not stop at the third miss");
    }
    {
        EarlyStopping s(2);
        s.observe(0.9);
        s.observe(1.0);
        s.observe(0.8);  // reset
        s.observe(0.85);
        require(!s.should_stop(), "reset was ignored");
        s.observe(0.85);
        require(s.should_stop(), "did not stop after the reset window");
    }
    {
        EarlyStopping s(1);
        s.observe(0.5);
        s.observe(0.5);  // equality is not an improvement
        require(s.should_stop(), "tie treated as improvement");
        require(s.best() == 0.5, "best loss lost");
    }

    // snapshot semantics on a real run: the returned model reproduces the
    // minimum logged validation loss exactly
    Rng rng(91);
    std::vector<LabeledExample> train_set, dev_set;
    for (int i = 0; i < 12; ++i) {
        LabeledExample ex;
        ex.label = i % 2;
        ex.utt_id = "u" + std::to_string(i);
        nn::Tensor split({12, 9});
        for (double& v : split.data)
            v = (ex.label ? 0.5 : -0.5) + uniform(rng, -0.4, 0.4);
        ex.splits.push_back(std::move(split));
        (i < 8 ? train_set : dev_set).push_back(std::move(ex));
    }
    Network net = build(model3_default(12, 9), 92);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.max_epochs = 4;
    cfg.patience = 4;
    cfg.seed = 93;
    cfg.adam.learning_rate = 1e-3;
    TrainResult res = train(net, train_set, dev_set, cfg);
    require(res.logs.size() == 4, "expected exactly max_epochs logs");
    double best = res.logs[0].dev_loss;
    for (const EpochLog& l : res.logs) best = std::min(best, l.dev_loss);
    require(evaluate_loss(res.best, dev_set) == best,
            "returned snapshot does not reproduce the best validation loss");
}

// ---------------------------------------------------------------------
// criterion 10: gaussian backend lands near the end-to-end EER

void criterion_gaussian_backend() {
    require(g_e2e_dev_eer >= 0.0, "criterion 8 must run first");
    const std::string cli = subprocess::cli_path();
    const fs::path dir = g_run1_dir;
    const fs::path scores = dir / "dev_gaussian.scores";
    auto r = subprocess::run(cli + " score --checkpoint " + q(dir / "model/checkpoint.ckpt") +
                             " --model " + q(dir / "model/model.config") + " --manifest " +
                             q(dir / "corpus/dev/protocol.txt") + " --features " +
                             q(dir / "feats/dev") + " --out " + q(scores) +
                             " --backend gaussian --fit-manifest " +
                             q(dir / "corpus/train/protocol.txt") + " --fit-features " +
                             q(dir / "feats/train"));
    require(r.exit_code == 0, "gaussian scoring failed:\n" + r.output);
    auto e = subprocess::run(cli + " eer --scores " + q(scores));
    require(e.exit_code == 0, "eer failed:\n" + e.output);
    const double gauss = parse_eer_percent(e.output);
    require(std::abs(gauss - g_e2e_dev_eer) <= 10.0,
            "gaussian EER " + std::to_string(gauss) + "% vs end-to-end " +
                std::to_string(g_e2e_dev_eer) + "% (limit 10 points)");

    // the two scoring routes should rank utterances consistently
    ScoreSet e2e = read_scores(dir / "dev.scores");
    ScoreSet gb = read_scores(scores);
    require(e2e.size() == gb.size(), "score files disagree on trial count");
    auto ranks = [](const ScoreSet& s) {
        std::vector<std::size_t> order(s.size()), rank(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return s[a].score < s[b].score; });
        for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
        return rank;
    };
    const auto ra = ranks(e2e), rb = ranks(gb);
    double num = 0.0, da = 0.0, db = 0.0;
    const double mean = static_cast<double>(ra.size() - 1) / 2.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double xa = static_cast<double>(ra[i]) - mean;
        const double xb = static_cast<double>(rb[i]) - mean;
        num += xa * xb;
        da += xa * xa;
        db += xb * xb;
    }
    const double spearman = num / std::sqrt(da * db);
    require(spearman > 0.0, "rank correlation " + std::to_string(spearman) + " not positive");
}

}  // namespace

int main() {
#if defined(__GLIBC__)
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, -1);
#endif

    struct Criterion {
        int id;
        const char* name;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "parameter-count oracle (7682)", criterion_param_count},
        {2, "spectrogram shape oracles", criterion_shapes},
        {3, "finite-difference gradient suite", criterion_gradients},
        {4, "EER brute-force oracle equivalence", criterion_eer_oracles},
        {5, "Adam closed-form updates", criterion_adam},
        {6, "split-data law", criterion_split_law},
        {7, "two-sample overfit", criterion_overfit},
        {8, "end-to-end synthetic run, bit-reproducible", criterion_end_to_end},
        {9, "early-stopping semantics", criterion_early_stopping},
        {10, "gaussian backend vs end-to-end", criterion_gaussian_backend},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = Clock::now();
        try {
            c.run();
            const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
            std::printf("[PASS] criterion %2d: %s (%.2f s)\n", c.id, c.name, secs);
        } catch (const std::exception& e) {
            ++failed;
            std::printf("[FAIL] criterion %2d: %s -- %s\n", c.id, c.name, e.what());
        }
        std::fflush(stdout);
    }
    if (failed) std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failed == 0 ? 0 : 1;
}
