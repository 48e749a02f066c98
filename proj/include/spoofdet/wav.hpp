#pragma once

#include <filesystem>
#include <vector>

namespace spoofdet {

// Raw audio unit: mono PCM samples in [-1, 1] plus their rate.
struct Waveform {
    std::vector<double> samples;
    int sample_rate = 16000;

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// RIFF WAV, 16-bit signed PCM, mono. Samples map to [-1, 1) by division
// by 32768; the writer rounds and saturates on the way back.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& w);

}  // namespace spoofdet
