#include "spoofdet/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spoofdet/rng.hpp"

namespace spoofdet {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

std::vector<ProtocolEntry> parse_protocol(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open protocol file: " + path.string());
    std::vector<ProtocolEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() < 2)
            throw std::runtime_error("protocol " + path.string() + " line " +
                                     std::to_string(line_no) + ": need at least id and label");
        ProtocolEntry e;
        e.file_id = tok[0];
        const std::string lab = lower(tok[1]);
        if (lab == "genuine") e.label = 1;
        else if (lab == "spoof") e.label = 0;
        else
            throw std::runtime_error("protocol " + path.string() + " line " +
                                     std::to_string(line_no) + ": unknown label '" + tok[1] + "'");
        std::string* fields[5] = {&e.speaker, &e.phrase, &e.environment, &e.playback, &e.recording};
        for (std::size_t i = 0; i < 5; ++i)
            if (tok.size() > i + 2) *fields[i] = tok[i + 2];
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_protocol(const std::vector<ProtocolEntry>& entries, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write protocol file: " + path.string());
    for (const ProtocolEntry& e : entries)
        os << e.file_id << ' ' << (e.label == 1 ? "genuine" : "spoof") << ' ' << e.speaker << ' '
           << e.phrase << ' ' << e.environment << ' ' << e.playback << ' ' << e.recording << '\n';
    if (!os) throw std::runtime_error("short write: " + path.string());
}

const std::set<std::string>& default_blacklist() {
    static const std::set<std::string> ids = {"T_1001658.wav", "T_1000150.wav"};
    return ids;
}

std::vector<ProtocolEntry> apply_blacklist(const std::vector<ProtocolEntry>& entries,
                                           const std::set<std::string>& blacklist) {
    std::vector<ProtocolEntry> out;
    out.reserve(entries.size());
    for (const ProtocolEntry& e : entries)
        if (!blacklist.count(e.file_id)) out.push_back(e);
    return out;
}

Waveform trim_leading_zeros(const Waveform& w, bool enabled) {
    if (!enabled) return w;
    std::size_t first = 0;
    while (first < w.samples.size() && w.samples[first] == 0.0) ++first;
    Waveform out;
    out.sample_rate = w.sample_rate;
    if (first == w.samples.size()) {
        out.samples = {0.0};  // an all-zero signal keeps one zero sample
        return out;
    }
    out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(first), w.samples.end());
    return out;
}

ConfigurationStats configuration_stats(const std::vector<ProtocolEntry>& entries) {
    ConfigurationStats stats;
    for (const ProtocolEntry& e : entries) {
        if (e.label == 1) continue;
        stats.environment[e.environment]++;
        stats.playback[e.playback]++;
        stats.recording[e.recording]++;
        stats.joint[e.environment + " " + e.playback + " " + e.recording]++;
    }
    return stats;
}

// --- synthetic corpus ---------------------------------------------------

void SynthConfig::validate() const {
    if (n_genuine == 0 || n_spoof == 0) throw std::invalid_argument("synth: counts must be positive");
    if (min_seconds <= 0.0 || max_seconds < min_seconds)
        throw std::invalid_argument("synth: bad duration range");
    if (sample_rate <= 0) throw std::invalid_argument("synth: sample rate must be positive");
    if (lowpass_cutoff_hz <= 0.0 || lowpass_cutoff_hz >= sample_rate / 2.0)
        throw std::invalid_argument("synth: cutoff must lie below Nyquist");
    if (n_configurations == 0) throw std::invalid_argument("synth: need at least one configuration");
}

namespace {

// Voice-like source: a few harmonics with slow amplitude modulation plus
// noise whose spectrum falls off toward high frequencies (white noise mixed
// with its one-pole low-passed copy).
std::vector<double> harmonic_signal(Rng& rng, std::size_t n, int sample_rate) {
    const double f0 = uniform(rng, 90.0, 280.0);
    const std::size_t harmonics = 3 + uniform_index(rng, 3);  // 3..5
    std::vector<double> amp(harmonics), phase(harmonics);
    for (std::size_t k = 0; k < harmonics; ++k) {
        amp[k] = uniform(rng, 0.4, 1.0) / static_cast<double>(k + 1);
        phase[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    }
    const double am_freq = uniform(rng, 2.0, 5.0);
    const double am_depth = uniform(rng, 0.1, 0.3);

    std::vector<double> x(n, 0.0);
    const double dt = 1.0 / sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        double v = 0.0;
        for (std::size_t k = 0; k < harmonics; ++k)
            v += amp[k] * std::sin(2.0 * std::numbers::pi * f0 * (k + 1) * t + phase[k]);
        x[i] = v * (1.0 + am_depth * std::sin(2.0 * std::numbers::pi * am_freq * t));
    }

    // harmonic RMS, then noise at ~20 dB SNR
    double power = 0.0;
    for (double v : x) power += v * v;
    const double rms = std::sqrt(power / static_cast<double>(n));
    const double snr_db = uniform(rng, 18.0, 24.0);
    const double noise_rms = rms / std::pow(10.0, snr_db / 20.0);

    const double lp_alpha = 0.1;  // brownish component
    double lp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double white = gaussian(rng);
        lp += lp_alpha * (white - lp);
        x[i] += noise_rms * (0.5 * white + 3.0 * lp);
    }

    // normalize peak to a random headroom
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    const double gain = uniform(rng, 0.4, 0.8) / std::max(peak, 1e-9);
    for (double& v : x) v *= gain;
    return x;
}

void replay_channel(std::vector<double>& x, Rng& rng, int sample_rate, double cutoff_hz,
                    double noise_level) {
    // first-order low-pass
    const double alpha = 1.0 - std::exp(-2.0 * std::numbers::pi * cutoff_hz / sample_rate);
    double state = 0.0;
    for (double& v : x) {
        state += alpha * (v - state);
        v = state;
    }
    // mild memoryless saturation, like a cheap speaker driven hot
    const double drive = uniform(rng, 1.5, 3.0);
    for (double& v : x) v = std::tanh(drive * v) / drive;
    // recording noise
    const double noise = noise_level * uniform(rng, 0.5, 1.5);
    for (double& v : x) v += noise * gaussian(rng);
    // playback/recording gain
    const double gain = uniform(rng, 0.5, 1.1);
    double peak = 0.0;
    for (double& v : x) {
        v *= gain;
        peak = std::max(peak, std::abs(v));
    }
    if (peak > 0.95)
        for (double& v : x) v *= 0.95 / peak;
}

std::string device_id(char prefix, std::size_t idx) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%c%02zu", prefix, idx + 1);
    return buf;
}

}  // namespace

std::vector<ProtocolEntry> generate_synthetic_corpus(const SynthConfig& cfg,
                                                     const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    std::vector<ProtocolEntry> entries;
    const std::size_t total = cfg.n_genuine + cfg.n_spoof;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Rng rng(mix_seed(cfg.seed, idx));
        const bool genuine = idx < cfg.n_genuine;

        const double seconds = uniform(rng, cfg.min_seconds, cfg.max_seconds);
        const std::size_t n =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(seconds * cfg.sample_rate)));

        Waveform w;
        w.sample_rate = cfg.sample_rate;
        w.samples = harmonic_signal(rng, n, cfg.sample_rate);

        ProtocolEntry e;
        char id[32];
        std::snprintf(id, sizeof(id), "%s_%07zu.wav", cfg.file_prefix.c_str(), 1000001 + idx);
        e.file_id = id;
        e.label = genuine ? 1 : 0;
        e.speaker = device_id('M', uniform_index(rng, 6));
        e.phrase = device_id('S', uniform_index(rng, 10));
        if (!genuine) {
            const std::size_t c = uniform_index(rng, cfg.n_configurations);
            // each configuration shifts the channel slightly
            const double cutoff = cfg.lowpass_cutoff_hz * (1.0 + 0.15 * static_cast<double>(c));
            replay_channel(w.samples, rng, cfg.sample_rate, cutoff, cfg.channel_noise);
            e.environment = device_id('E', c % 6);
            e.playback = device_id('P', c % 15);
            e.recording = device_id('R', c % 16);
        }
        write_wav(out_dir / e.file_id, w);
        entries.push_back(std::move(e));
    }
    write_protocol(entries, out_dir / "protocol.txt");
    return entries;
}

}  // namespace spoofdet
