#include "spoofdet/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "spoofdet/io.hpp"

namespace spoofdet {

namespace {

void require_nonempty(const Waveform& w, const char* op) {
    if (w.samples.empty()) throw std::invalid_argument(std::string(op) + ": empty waveform");
    if (w.sample_rate <= 0) throw std::invalid_argument(std::string(op) + ": sample rate must be positive");
}

// Iterative radix-2 FFT, in place. Sizes that are not a power of two fall
// back to the direct DFT; the shipped configurations are all powers of two.
bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

void dft_naive(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) {
    const std::size_t n = in.size();
    out.assign(n, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(t) / static_cast<double>(n);
            acc += in[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
}

}  // namespace

void SpectrogramConfig::validate() const {
    if (fft_size == 0 || window_size == 0 || hop == 0)
        throw std::invalid_argument("spectrogram config: sizes must be positive");
    if (window_size > fft_size)
        throw std::invalid_argument("spectrogram config: window_size must not exceed fft_size");
    if (log_floor <= 0.0) throw std::invalid_argument("spectrogram config: log_floor must be positive");
}

void SplitConfig::validate() const {
    if (spec_wind == 0 || wind_shift == 0)
        throw std::invalid_argument("split config: window and shift must be positive");
    if (wind_shift > spec_wind)
        throw std::invalid_argument("split config: wind_shift must not exceed spec_wind");
}

Waveform pad_or_truncate_whole_seconds(const Waveform& w) {
    require_nonempty(w, "pad_or_truncate_whole_seconds");
    const std::size_t sr = static_cast<std::size_t>(w.sample_rate);
    const std::size_t n = w.samples.size();
    const std::size_t whole = (n + sr - 1) / sr;  // ceil(duration) in seconds
    const std::size_t target = whole * sr;
    if (target == n) return w;
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples.resize(target);
    for (std::size_t i = 0; i < target; ++i) out.samples[i] = w.samples[i % n];
    return out;
}

Waveform fix_length(const Waveform& w, double seconds) {
    require_nonempty(w, "fix_length");
    if (seconds <= 0.0) throw std::invalid_argument("fix_length: seconds must be positive");
    const std::size_t target =
        static_cast<std::size_t>(std::llround(seconds * static_cast<double>(w.sample_rate)));
    if (target == 0) throw std::invalid_argument("fix_length: target length is zero samples");
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples.resize(target);
    const std::size_t n = w.samples.size();
    for (std::size_t i = 0; i < target; ++i) out.samples[i] = w.samples[i % n];
    return out;
}

Spectrogram log_power_spectrogram(const Waveform& w, const SpectrogramConfig& cfg) {
    cfg.validate();
    require_nonempty(w, "log_power_spectrogram");
    const std::size_t n = w.samples.size();
    if (n < cfg.window_size)
        throw std::invalid_argument("log_power_spectrogram: waveform shorter than one window (" +
                                    std::to_string(n) + " < " + std::to_string(cfg.window_size) + ")");

    const std::size_t frames = n / cfg.hop;
    const std::size_t bins = cfg.fft_size / 2 + 1;
    Spectrogram spec(frames, bins,
                     static_cast<double>(cfg.hop) / static_cast<double>(w.sample_rate));

    // periodic Hann
    std::vector<double> window(cfg.window_size);
    for (std::size_t k = 0; k < cfg.window_size; ++k)
        window[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                         static_cast<double>(cfg.window_size));

    std::vector<std::complex<double>> buf(cfg.fft_size);
    std::vector<std::complex<double>> out;
    const bool pow2 = is_pow2(cfg.fft_size);
    for (std::size_t t = 0; t < frames; ++t) {
        const std::size_t start = t * cfg.hop;
        for (std::size_t k = 0; k < cfg.fft_size; ++k) {
            double v = 0.0;
            if (k < cfg.window_size && start + k < n) v = w.samples[start + k] * window[k];
            buf[k] = {v, 0.0};
        }
        const std::vector<std::complex<double>>* coeffs;
        if (pow2) {
            fft_pow2(buf);
            coeffs = &buf;
        } else {
            dft_naive(buf, out);
            coeffs = &out;
        }
        for (std::size_t f = 0; f < bins; ++f) {
            const std::complex<double>& x = (*coeffs)[f];
            spec.at(t, f) = std::log(x.real() * x.real() + x.imag() * x.imag() + cfg.log_floor);
        }
    }
    return spec;
}

NormStats fit_normalizer(const std::vector<Spectrogram>& specs) {
    if (specs.empty()) throw std::invalid_argument("fit_normalizer: no spectrograms");
    const std::size_t bins = specs[0].bins;
    std::size_t total_frames = 0;
    for (const Spectrogram& s : specs) {
        if (s.bins != bins)
            throw std::invalid_argument("fit_normalizer: mismatched bin counts (" +
                                        std::to_string(s.bins) + " vs " + std::to_string(bins) + ")");
        total_frames += s.frames;
    }
    if (total_frames == 0) throw std::invalid_argument("fit_normalizer: no frames");

    NormStats stats;
    stats.mean.assign(bins, 0.0);
    stats.std_dev.assign(bins, 0.0);
    for (const Spectrogram& s : specs)
        for (std::size_t t = 0; t < s.frames; ++t)
            for (std::size_t f = 0; f < bins; ++f) stats.mean[f] += s.at(t, f);
    for (std::size_t f = 0; f < bins; ++f) stats.mean[f] /= static_cast<double>(total_frames);

    for (const Spectrogram& s : specs)
        for (std::size_t t = 0; t < s.frames; ++t)
            for (std::size_t f = 0; f < bins; ++f) {
                const double d = s.at(t, f) - stats.mean[f];
                stats.std_dev[f] += d * d;
            }
    for (std::size_t f = 0; f < bins; ++f) {
        const double var = stats.std_dev[f] / static_cast<double>(total_frames);
        stats.std_dev[f] = std::max(std::sqrt(std::max(var, 0.0)), 1e-8);
    }
    return stats;
}

Spectrogram normalize(const Spectrogram& spec, const NormStats& stats) {
    if (stats.mean.size() != spec.bins || stats.std_dev.size() != spec.bins)
        throw std::invalid_argument("normalize: stats dimension " + std::to_string(stats.mean.size()) +
                                    " does not match spectrogram bins " + std::to_string(spec.bins));
    Spectrogram out(spec.frames, spec.bins, spec.frame_hop_seconds);
    for (std::size_t t = 0; t < spec.frames; ++t)
        for (std::size_t f = 0; f < spec.bins; ++f)
            out.at(t, f) = (spec.at(t, f) - stats.mean[f]) / stats.std_dev[f];
    return out;
}

std::vector<Spectrogram> split_spectrogram(const Spectrogram& spec, const SplitConfig& cfg) {
    cfg.validate();
    if (spec.frames < cfg.spec_wind)
        throw std::invalid_argument("split_spectrogram: " + std::to_string(spec.frames) +
                                    " frames is shorter than the window of " +
                                    std::to_string(cfg.spec_wind));
    const std::size_t k = (spec.frames - cfg.spec_wind) / cfg.wind_shift + 1;
    std::vector<Spectrogram> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        Spectrogram part(cfg.spec_wind, spec.bins, spec.frame_hop_seconds);
        const std::size_t start = i * cfg.wind_shift;
        std::copy_n(spec.values.begin() + static_cast<std::ptrdiff_t>(start * spec.bins),
                    cfg.spec_wind * spec.bins, part.values.begin());
        out.push_back(std::move(part));
    }
    return out;
}

void write_split_cache(const std::filesystem::path& path, const std::vector<Spectrogram>& splits) {
    if (splits.empty()) throw std::invalid_argument("write_split_cache: no splits to write");
    const std::size_t t = splits[0].frames, f = splits[0].bins;
    for (const Spectrogram& s : splits)
        if (s.frames != t || s.bins != f)
            throw std::invalid_argument("write_split_cache: splits must share one shape");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write feature cache: " + path.string());
    io::put_magic(os, "SPG1");
    io::put_u32(os, static_cast<std::uint32_t>(splits.size()));
    io::put_u32(os, static_cast<std::uint32_t>(t));
    io::put_u32(os, static_cast<std::uint32_t>(f));
    for (const Spectrogram& s : splits)
        for (double v : s.values) io::put_f32(os, static_cast<float>(v));
    if (!os) throw std::runtime_error("short write: " + path.string());
}

std::vector<Spectrogram> read_split_cache(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open feature cache: " + path.string());
    io::expect_magic(is, "SPG1", path.string());
    const std::uint32_t count = io::get_u32(is);
    const std::uint32_t t = io::get_u32(is);
    const std::uint32_t f = io::get_u32(is);
    std::vector<Spectrogram> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Spectrogram s(t, f);
        for (double& v : s.values) v = static_cast<double>(io::get_f32(is));
        out.push_back(std::move(s));
    }
    return out;
}

void write_norm_stats(const std::filesystem::path& path, const NormStats& stats) {
    if (stats.mean.size() != stats.std_dev.size() || stats.mean.empty())
        throw std::invalid_argument("write_norm_stats: malformed stats");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write norm stats: " + path.string());
    io::put_magic(os, "NRM1");
    io::put_u32(os, static_cast<std::uint32_t>(stats.mean.size()));
    for (double v : stats.mean) io::put_f64(os, v);
    for (double v : stats.std_dev) io::put_f64(os, v);
    if (!os) throw std::runtime_error("short write: " + path.string());
}

NormStats read_norm_stats(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open norm stats: " + path.string());
    io::expect_magic(is, "NRM1", path.string());
    const std::uint32_t bins = io::get_u32(is);
    NormStats stats;
    stats.mean.resize(bins);
    stats.std_dev.resize(bins);
    for (double& v : stats.mean) v = io::get_f64(is);
    for (double& v : stats.std_dev) v = io::get_f64(is);
    return stats;
}

}  // namespace spoofdet
