#include "spoofdet/model.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "spoofdet/io.hpp"

namespace spoofdet {

LayerSpec LayerSpec::make_conv(std::size_t filters, std::size_t kh, std::size_t kw,
                               nn::Padding pad, bool bias) {
    LayerSpec l;
    l.kind = LayerKind::conv;
    l.filters = filters;
    l.kernel_h = kh;
    l.kernel_w = kw;
    l.padding = pad;
    l.bias = bias;
    return l;
}

LayerSpec LayerSpec::make_pool(std::size_t k, std::size_t s, bool ceil) {
    LayerSpec l;
    l.kind = LayerKind::maxpool;
    l.pool = {k, k, s, s, ceil};
    return l;
}

LayerSpec LayerSpec::make_activation(ActivationKind a, double alpha) {
    LayerSpec l;
    l.kind = LayerKind::activation;
    l.act = a;
    l.elu_alpha = alpha;
    return l;
}

LayerSpec LayerSpec::make_flatten() {
    LayerSpec l;
    l.kind = LayerKind::flatten;
    return l;
}

LayerSpec LayerSpec::make_dropout(double rate) {
    LayerSpec l;
    l.kind = LayerKind::dropout;
    l.rate = rate;
    return l;
}

LayerSpec LayerSpec::make_linear(std::size_t width, bool bias) {
    LayerSpec l;
    l.kind = LayerKind::linear;
    l.width = width;
    l.bias = bias;
    return l;
}

namespace {

std::size_t pool_extent(std::size_t sz, std::size_t k, std::size_t s, bool ceil_mode,
                        std::size_t layer_idx) {
    std::size_t o;
    if (ceil_mode) {
        o = sz <= k ? 1 : (sz - k + s - 1) / s + 1;
        while (o > 1 && (o - 1) * s >= sz) --o;
    } else {
        o = sz < k ? 0 : (sz - k) / s + 1;
    }
    if (o == 0)
        throw std::invalid_argument("layer " + std::to_string(layer_idx) +
                                    ": maxpool collapses a " + std::to_string(sz) +
                                    "-wide axis to nothing");
    return o;
}

const char* act_name(ActivationKind a) {
    switch (a) {
        case ActivationKind::mfm: return "mfm";
        case ActivationKind::relu: return "relu";
        case ActivationKind::elu: return "elu";
        case ActivationKind::identity: return "identity";
    }
    return "?";
}

}  // namespace

std::vector<std::pair<std::string, nn::Shape>> shape_trace(const ModelConfig& config) {
    if (config.in_channels == 0 || config.in_h == 0 || config.in_w == 0)
        throw std::invalid_argument("model input shape must be positive");
    std::vector<std::pair<std::string, nn::Shape>> trace;
    bool flat = false;
    std::size_t c = config.in_channels, h = config.in_h, w = config.in_w;
    std::size_t d = 0;
    trace.emplace_back("input", nn::Shape{c, h, w});
    for (std::size_t i = 0; i < config.layers.size(); ++i) {
        const LayerSpec& l = config.layers[i];
        std::ostringstream name;
        switch (l.kind) {
            case LayerKind::conv: {
                if (flat)
                    throw std::invalid_argument("layer " + std::to_string(i) +
                                                ": conv after flatten");
                if (l.filters == 0)
                    throw std::invalid_argument("layer " + std::to_string(i) + ": conv needs filters");
                if (l.padding == nn::Padding::valid && (l.kernel_h > h || l.kernel_w > w))
                    throw std::invalid_argument("layer " + std::to_string(i) +
                                                ": kernel larger than input");
                if (l.padding == nn::Padding::valid) {
                    h = h - l.kernel_h + 1;
                    w = w - l.kernel_w + 1;
                }
                c = l.filters;
                name << "conv(" << l.filters << "," << l.kernel_h << "x" << l.kernel_w << ","
                     << (l.padding == nn::Padding::same ? "same" : "valid") << ")";
                break;
            }
            case LayerKind::maxpool: {
                if (flat)
                    throw std::invalid_argument("layer " + std::to_string(i) +
                                                ": maxpool after flatten");
                h = pool_extent(h, l.pool.kernel_h, l.pool.stride_h, l.pool.ceil_mode, i);
                w = pool_extent(w, l.pool.kernel_w, l.pool.stride_w, l.pool.ceil_mode, i);
                name << "maxpool(" << l.pool.kernel_h << "x" << l.pool.kernel_w << "/"
                     << l.pool.stride_h << "x" << l.pool.stride_w
                     << (l.pool.ceil_mode ? ",ceil" : ",floor") << ")";
                break;
            }
            case LayerKind::activation: {
                if (l.act == ActivationKind::mfm) {
                    std::size_t& axis = flat ? d : c;
                    if (axis % 2 != 0)
                        throw std::invalid_argument("layer " + std::to_string(i) +
                                                    ": mfm needs an even extent, got " +
                                                    std::to_string(axis));
                    axis /= 2;
                }
                name << act_name(l.act);
                break;
            }
            case LayerKind::flatten: {
                if (flat)
                    throw std::invalid_argument("layer " + std::to_string(i) + ": double flatten");
                flat = true;
                d = c * h * w;
                name << "flatten";
                break;
            }
            case LayerKind::dropout: {
                name << "dropout(" << l.rate << ")";
                break;
            }
            case LayerKind::linear: {
                if (!flat)
                    throw std::invalid_argument("layer " + std::to_string(i) +
                                                ": linear before flatten");
                if (l.width == 0)
                    throw std::invalid_argument("layer " + std::to_string(i) + ": linear needs width");
                d = l.width;
                name << "linear(" << l.width << (l.bias ? ",bias" : ",no bias") << ")";
                break;
            }
        }
        trace.emplace_back(name.str(), flat ? nn::Shape{d} : nn::Shape{c, h, w});
    }
    return trace;
}

void ModelConfig::validate() const {
    auto trace = shape_trace(*this);
    const nn::Shape& out = trace.back().second;
    if (out.size() != 1 || out[0] != 2)
        throw std::invalid_argument("model must end in a width-2 layer, got " +
                                    nn::shape_str(out));
}

std::size_t count_params(const ModelConfig& config) {
    std::size_t total = 0;
    bool flat = false;
    std::size_t c = config.in_channels, h = config.in_h, w = config.in_w, d = 0;
    for (std::size_t i = 0; i < config.layers.size(); ++i) {
        const LayerSpec& l = config.layers[i];
        switch (l.kind) {
            case LayerKind::conv:
                total += l.filters * c * l.kernel_h * l.kernel_w + (l.bias ? l.filters : 0);
                c = l.filters;
                if (l.padding == nn::Padding::valid) {
                    h = h - l.kernel_h + 1;
                    w = w - l.kernel_w + 1;
                }
                break;
            case LayerKind::maxpool:
                h = pool_extent(h, l.pool.kernel_h, l.pool.stride_h, l.pool.ceil_mode, i);
                w = pool_extent(w, l.pool.kernel_w, l.pool.stride_w, l.pool.ceil_mode, i);
                break;
            case LayerKind::activation:
                if (l.act == ActivationKind::mfm) (flat ? d : c) /= 2;
                break;
            case LayerKind::flatten:
                flat = true;
                d = c * h * w;
                break;
            case LayerKind::dropout:
                break;
            case LayerKind::linear:
                total += d * l.width + (l.bias ? l.width : 0);
                d = l.width;
                break;
        }
    }
    return total;
}

ModelConfig model3_default(std::size_t in_h, std::size_t in_w, ActivationKind act) {
    ModelConfig cfg;
    cfg.in_channels = 1;
    cfg.in_h = in_h;
    cfg.in_w = in_w;
    for (int block = 0; block < 3; ++block) {
        cfg.layers.push_back(LayerSpec::make_conv(16, 1, 9, nn::Padding::same, true));
        cfg.layers.push_back(LayerSpec::make_activation(act));
        cfg.layers.push_back(LayerSpec::make_pool(3, 3, true));
    }
    cfg.layers.push_back(LayerSpec::make_flatten());
    cfg.layers.push_back(LayerSpec::make_dropout(0.5));
    cfg.layers.push_back(LayerSpec::make_linear(32, false));
    cfg.layers.push_back(LayerSpec::make_linear(2, true));
    return cfg;
}

Network build(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    const auto trace = shape_trace(config);  // trace[i] = shape entering layer i
    Network net;
    net.config = config;
    net.init_seed = seed;
    Rng rng(seed);

    std::size_t conv_idx = 0, fc_idx = 0;
    for (std::size_t i = 0; i < config.layers.size(); ++i) {
        const LayerSpec& l = config.layers[i];
        const nn::Shape& in = trace[i].second;
        if (l.kind == LayerKind::conv) {
            ++conv_idx;
            const std::string base = "conv" + std::to_string(conv_idx);
            net.param_names.push_back(base + ".weight");
            net.params.push_back(nn::xavier_init({l.filters, in[0], l.kernel_h, l.kernel_w}, rng));
            if (l.bias) {
                net.param_names.push_back(base + ".bias");
                net.params.push_back(nn::Tensor::zeros({l.filters}));
            }
        } else if (l.kind == LayerKind::linear) {
            ++fc_idx;
            const std::string base = "fc" + std::to_string(fc_idx);
            net.param_names.push_back(base + ".weight");
            net.params.push_back(nn::xavier_init({in[0], l.width}, rng));
            if (l.bias) {
                net.param_names.push_back(base + ".bias");
                net.params.push_back(nn::Tensor::zeros({l.width}));
            }
        }
    }
    return net;
}

std::size_t count_params(const Network& net) {
    std::size_t total = 0;
    for (const nn::Tensor& p : net.params) total += p.numel();
    return total;
}

ForwardResult forward_graph(const ModelConfig& config, const std::vector<nn::Var>& params,
                            const nn::Var& batch, bool training, Rng* rng) {
    const nn::Tensor& b = batch->value;
    if (b.rank() != 4 || b.shape[1] != config.in_channels || b.shape[2] != config.in_h ||
        b.shape[3] != config.in_w)
        throw std::invalid_argument("batch shape " + nn::shape_str(b.shape) +
                                    " does not match model input " +
                                    std::to_string(config.in_channels) + "x" +
                                    std::to_string(config.in_h) + "x" + std::to_string(config.in_w));

    ForwardResult res;
    nn::Var x = batch;
    std::size_t pi = 0;
    auto next_param = [&](const char* what) -> const nn::Var& {
        if (pi >= params.size())
            throw std::invalid_argument(std::string("forward: missing parameter for ") + what);
        return params[pi++];
    };
    for (const LayerSpec& l : config.layers) {
        switch (l.kind) {
            case LayerKind::conv: {
                const nn::Var& w = next_param("conv weight");
                nn::Var bias = l.bias ? next_param("conv bias") : nullptr;
                x = nn::conv2d(x, w, bias, l.padding);
                break;
            }
            case LayerKind::maxpool:
                x = nn::maxpool2d(x, l.pool);
                break;
            case LayerKind::activation:
                switch (l.act) {
                    case ActivationKind::mfm: x = nn::mfm(x); break;
                    case ActivationKind::relu: x = nn::relu(x); break;
                    case ActivationKind::elu: x = nn::elu(x, l.elu_alpha); break;
                    case ActivationKind::identity: break;
                }
                break;
            case LayerKind::flatten:
                x = nn::flatten2d(x);
                break;
            case LayerKind::dropout:
                if (training && l.rate > 0.0) {
                    if (!rng)
                        throw std::invalid_argument("training forward requires an rng for dropout");
                    x = nn::dropout(x, l.rate, *rng, true);
                }
                break;
            case LayerKind::linear: {
                const nn::Var& w = next_param("linear weight");
                nn::Var bias = l.bias ? next_param("linear bias") : nullptr;
                x = nn::linear(x, w, bias);
                if (!res.embedding) res.embedding = x;
                break;
            }
        }
    }
    if (pi != params.size())
        throw std::invalid_argument("forward: parameter count does not match the layer stack");
    res.logits = x;
    return res;
}

ForwardResult forward(const Network& net, const nn::Tensor& batch, bool training, Rng* rng) {
    std::vector<nn::Var> pv;
    pv.reserve(net.params.size());
    for (const nn::Tensor& p : net.params) pv.push_back(nn::constant(p));
    return forward_graph(net.config, pv, nn::constant(batch), training, rng);
}

// -- text config -------------------------------------------------------

std::string config_to_text(const ModelConfig& config) {
    std::ostringstream os;
    os << "input channels=" << config.in_channels << " time=" << config.in_h
       << " freq=" << config.in_w << "\n";
    os << "labels " << config.class_names[0] << " " << config.class_names[1] << "\n";
    for (const LayerSpec& l : config.layers) {
        switch (l.kind) {
            case LayerKind::conv:
                os << "conv filters=" << l.filters << " kernel=" << l.kernel_h << "x" << l.kernel_w
                   << " pad=" << (l.padding == nn::Padding::same ? "same" : "valid")
                   << " bias=" << (l.bias ? "yes" : "no") << "\n";
                break;
            case LayerKind::maxpool:
                os << "maxpool kernel=" << l.pool.kernel_h << "x" << l.pool.kernel_w
                   << " stride=" << l.pool.stride_h << "x" << l.pool.stride_w
                   << " ceil=" << (l.pool.ceil_mode ? "yes" : "no") << "\n";
                break;
            case LayerKind::activation:
                os << "activation kind=" << act_name(l.act);
                if (l.act == ActivationKind::elu) os << " alpha=" << l.elu_alpha;
                os << "\n";
                break;
            case LayerKind::flatten:
                os << "flatten\n";
                break;
            case LayerKind::dropout:
                os << "dropout rate=" << l.rate << "\n";
                break;
            case LayerKind::linear:
                os << "linear width=" << l.width << " bias=" << (l.bias ? "yes" : "no") << "\n";
                break;
        }
    }
    return os.str();
}

namespace {

std::map<std::string, std::string> parse_kv(std::istringstream& is, std::size_t line_no) {
    std::map<std::string, std::string> kv;
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

std::size_t kv_size(const std::map<std::string, std::string>& kv, const std::string& key,
                    std::size_t line_no) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": missing " + key);
    return static_cast<std::size_t>(std::stoull(it->second));
}

std::pair<std::size_t, std::size_t> kv_pair(const std::map<std::string, std::string>& kv,
                                            const std::string& key, std::size_t line_no) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": missing " + key);
    auto x = it->second.find('x');
    if (x == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected AxB for " +
                                    key);
    return {static_cast<std::size_t>(std::stoull(it->second.substr(0, x))),
            static_cast<std::size_t>(std::stoull(it->second.substr(x + 1)))};
}

bool kv_flag(const std::map<std::string, std::string>& kv, const std::string& key,
             std::size_t line_no) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": missing " + key);
    if (it->second == "yes" || it->second == "true" || it->second == "1") return true;
    if (it->second == "no" || it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad flag " + key + "=" +
                                it->second);
}

}  // namespace

ModelConfig config_from_text(const std::string& text) {
    ModelConfig cfg;
    cfg.layers.clear();
    bool have_input = false;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream is(line);
        std::string head;
        if (!(is >> head)) continue;
        if (head == "input") {
            auto kv = parse_kv(is, line_no);
            cfg.in_channels = kv_size(kv, "channels", line_no);
            cfg.in_h = kv_size(kv, "time", line_no);
            cfg.in_w = kv_size(kv, "freq", line_no);
            have_input = true;
        } else if (head == "labels") {
            if (!(is >> cfg.class_names[0] >> cfg.class_names[1]))
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": labels needs two names");
        } else if (head == "conv") {
            auto kv = parse_kv(is, line_no);
            auto [kh, kw] = kv_pair(kv, "kernel", line_no);
            auto it = kv.find("pad");
            if (it == kv.end() || (it->second != "same" && it->second != "valid"))
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": conv needs pad=same|valid");
            cfg.layers.push_back(LayerSpec::make_conv(
                kv_size(kv, "filters", line_no), kh, kw,
                it->second == "same" ? nn::Padding::same : nn::Padding::valid,
                kv_flag(kv, "bias", line_no)));
        } else if (head == "maxpool") {
            auto kv = parse_kv(is, line_no);
            auto [kh, kw] = kv_pair(kv, "kernel", line_no);
            auto [sh, sw] = kv_pair(kv, "stride", line_no);
            LayerSpec l;
            l.kind = LayerKind::maxpool;
            l.pool = {kh, kw, sh, sw, kv_flag(kv, "ceil", line_no)};
            cfg.layers.push_back(l);
        } else if (head == "activation") {
            auto kv = parse_kv(is, line_no);
            auto it = kv.find("kind");
            if (it == kv.end())
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": activation needs kind=");
            ActivationKind a;
            if (it->second == "mfm") a = ActivationKind::mfm;
            else if (it->second == "relu") a = ActivationKind::relu;
            else if (it->second == "elu") a = ActivationKind::elu;
            else if (it->second == "identity") a = ActivationKind::identity;
            else
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unknown activation '" + it->second + "'");
            double alpha = 1.0;
            if (auto ai = kv.find("alpha"); ai != kv.end()) alpha = std::stod(ai->second);
            cfg.layers.push_back(LayerSpec::make_activation(a, alpha));
        } else if (head == "flatten") {
            cfg.layers.push_back(LayerSpec::make_flatten());
        } else if (head == "dropout") {
            auto kv = parse_kv(is, line_no);
            auto it = kv.find("rate");
            if (it == kv.end())
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": dropout needs rate=");
            cfg.layers.push_back(LayerSpec::make_dropout(std::stod(it->second)));
        } else if (head == "linear") {
            auto kv = parse_kv(is, line_no);
            cfg.layers.push_back(
                LayerSpec::make_linear(kv_size(kv, "width", line_no), kv_flag(kv, "bias", line_no)));
        } else {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown layer '" + head + "'");
        }
    }
    if (!have_input) throw std::invalid_argument("model config is missing the input line");
    return cfg;
}

void save_config(const std::filesystem::path& path, const ModelConfig& config) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write model config: " + path.string());
    os << config_to_text(config);
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open model config: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return config_from_text(buf.str());
}

// -- checkpoints ---------------------------------------------------------

namespace {

void put_named_tensor(std::ostream& os, const std::string& name, const nn::Tensor& t) {
    io::put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    io::put_u32(os, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t e : t.shape) io::put_u32(os, static_cast<std::uint32_t>(e));
    for (double v : t.data) io::put_f64(os, v);
}

std::pair<std::string, nn::Tensor> get_named_tensor(std::istream& is) {
    const std::uint32_t name_len = io::get_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw std::runtime_error("checkpoint truncated in a tensor name");
    const std::uint32_t rank = io::get_u32(is);
    nn::Shape shape(rank);
    for (std::uint32_t i = 0; i < rank; ++i) shape[i] = io::get_u32(is);
    nn::Tensor t(shape);
    for (double& v : t.data) v = io::get_f64(is);
    return {std::move(name), std::move(t)};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Network& net,
                     const nn::AdamState& state) {
    if (state.m.size() != net.params.size() || state.v.size() != net.params.size())
        throw std::invalid_argument("save_checkpoint: optimizer state does not match parameters");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path.string());
    io::put_magic(os, "CKPT");
    io::put_u32(os, static_cast<std::uint32_t>(net.params.size()));
    for (std::size_t i = 0; i < net.params.size(); ++i)
        put_named_tensor(os, net.param_names[i], net.params[i]);
    io::put_u32(os, static_cast<std::uint32_t>(state.step_count));
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        put_named_tensor(os, net.param_names[i] + ".m", state.m[i]);
        put_named_tensor(os, net.param_names[i] + ".v", state.v[i]);
    }
    if (!os) throw std::runtime_error("short write: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());
    io::expect_magic(is, "CKPT", path.string());
    const std::uint32_t count = io::get_u32(is);
    Checkpoint ckpt;
    for (std::uint32_t i = 0; i < count; ++i) {
        auto [name, tensor] = get_named_tensor(is);
        ckpt.names.push_back(std::move(name));
        ckpt.params.push_back(std::move(tensor));
    }
    ckpt.state.step_count = io::get_u32(is);
    for (std::uint32_t i = 0; i < count; ++i) {
        auto [mn, m] = get_named_tensor(is);
        auto [vn, v] = get_named_tensor(is);
        if (mn != ckpt.names[i] + ".m" || vn != ckpt.names[i] + ".v")
            throw std::runtime_error("checkpoint optimizer state out of order at " + mn);
        ckpt.state.m.push_back(std::move(m));
        ckpt.state.v.push_back(std::move(v));
    }
    return ckpt;
}

void restore_params(Network& net, const Checkpoint& ckpt) {
    if (ckpt.names.size() != net.params.size())
        throw std::runtime_error("checkpoint has " + std::to_string(ckpt.names.size()) +
                                 " parameters, model expects " + std::to_string(net.params.size()));
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        if (ckpt.names[i] != net.param_names[i])
            throw std::runtime_error("checkpoint parameter '" + ckpt.names[i] +
                                     "' does not match model parameter '" + net.param_names[i] + "'");
        if (ckpt.params[i].shape != net.params[i].shape)
            throw std::runtime_error("checkpoint shape mismatch at " + ckpt.names[i] + ": " +
                                     nn::shape_str(ckpt.params[i].shape) + " vs " +
                                     nn::shape_str(net.params[i].shape));
        net.params[i] = ckpt.params[i];
    }
}

}  // namespace spoofdet
