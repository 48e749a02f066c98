#pragma once

#include <filesystem>
#include <vector>

#include "spoofdet/wav.hpp"

namespace spoofdet {

struct SpectrogramConfig {
    std::size_t fft_size = 256;
    std::size_t window_size = 256;
    std::size_t hop = 160;        // 10 ms at 16 kHz
    double log_floor = 1e-10;     // added under the log; keeps silent frames finite

    void validate() const;
};

// T x F matrix of normalized log-power values, the model input.
struct Spectrogram {
    std::size_t frames = 0;  // T
    std::size_t bins = 0;    // F = fft_size/2 + 1
    std::vector<double> values;  // row-major [frames][bins]
    double frame_hop_seconds = 0.0;

    Spectrogram() = default;
    Spectrogram(std::size_t t, std::size_t f, double hop_s = 0.0)
        : frames(t), bins(f), values(t * f, 0.0), frame_hop_seconds(hop_s) {}

    double& at(std::size_t t, std::size_t f) { return values[t * bins + f]; }
    double at(std::size_t t, std::size_t f) const { return values[t * bins + f]; }
};

struct NormStats {
    std::vector<double> mean;
    std::vector<double> std_dev;  // floored at 1e-8
};

struct SplitConfig {
    std::size_t spec_wind = 100;   // frames per window
    std::size_t wind_shift = 100;  // frames between window starts

    void validate() const;
};

// Extend to the next whole second by repeating samples cyclically from the
// start; waveforms already a whole number of seconds pass through untouched.
Waveform pad_or_truncate_whole_seconds(const Waveform& w);

// Force an exact duration: truncate from the front-aligned start, or extend
// by cyclic repetition.
Waveform fix_length(const Waveform& w, double seconds);

// ln(|STFT|^2 + log_floor) with a periodic Hann window; frame t covers
// samples [t*hop, t*hop + window_size), zero-padded past the end, giving
// exactly floor(n/hop) frames.
Spectrogram log_power_spectrogram(const Waveform& w, const SpectrogramConfig& cfg);

// Per-frequency-bin mean/std pooled over all frames of all inputs
// (population convention, std floored).
NormStats fit_normalizer(const std::vector<Spectrogram>& specs);

Spectrogram normalize(const Spectrogram& spec, const NormStats& stats);

// Sliding-window split: window i covers frames [i*wind_shift,
// i*wind_shift + spec_wind); trailing frames that do not fill a window are
// dropped.
std::vector<Spectrogram> split_spectrogram(const Spectrogram& spec, const SplitConfig& cfg);

// Feature cache: magic "SPG1", u32 LE {count, T, F}, then row-major f32 LE
// values per split.
void write_split_cache(const std::filesystem::path& path, const std::vector<Spectrogram>& splits);
std::vector<Spectrogram> read_split_cache(const std::filesystem::path& path);

// Norm stats file: magic "NRM1", u32 F, f64 LE means then stds.
void write_norm_stats(const std::filesystem::path& path, const NormStats& stats);
NormStats read_norm_stats(const std::filesystem::path& path);

}  // namespace spoofdet
