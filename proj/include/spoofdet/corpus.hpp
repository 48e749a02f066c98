#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spoofdet/wav.hpp"

namespace spoofdet {

// One protocol line. Device fields may carry the placeholder "-".
struct ProtocolEntry {
    std::string file_id;
    int label = 0;  // genuine = 1, spoof = 0
    std::string speaker = "-";
    std::string phrase = "-";
    std::string environment = "-";
    std::string playback = "-";
    std::string recording = "-";

    bool operator==(const ProtocolEntry&) const = default;
};

struct CorpusManifest {
    std::string subset;  // train | dev | eval
    std::vector<ProtocolEntry> entries;
    std::filesystem::path audio_root;
};

// Whitespace-separated fields: id label [speaker phrase env playback
// recording]; missing trailing fields become "-". Label matching is
// case-insensitive on {genuine, spoof}.
std::vector<ProtocolEntry> parse_protocol(const std::filesystem::path& path);
void write_protocol(const std::vector<ProtocolEntry>& entries, const std::filesystem::path& path);

// The two training files with no speech content.
const std::set<std::string>& default_blacklist();

std::vector<ProtocolEntry> apply_blacklist(const std::vector<ProtocolEntry>& entries,
                                           const std::set<std::string>& blacklist = default_blacklist());

// Removes the maximal exactly-zero prefix; an all-zero signal reduces to a
// single zero sample. Off by default in the pipeline (exposed as an
// ablation flag).
Waveform trim_leading_zeros(const Waveform& w, bool enabled);

// Spoofed-entry counts per environment, playback and recording device, and
// per joint "Exx Pyy Rzz" configuration.
struct ConfigurationStats {
    std::map<std::string, std::size_t> environment;
    std::map<std::string, std::size_t> playback;
    std::map<std::string, std::size_t> recording;
    std::map<std::string, std::size_t> joint;
};

ConfigurationStats configuration_stats(const std::vector<ProtocolEntry>& entries);

// Synthetic corpus: genuine = harmonic stack plus pink-ish noise; spoof =
// the same kind of signal pushed through a simulated replay channel
// (first-order low-pass, soft clipping, additive noise, random gain).
struct SynthConfig {
    std::size_t n_genuine = 200;
    std::size_t n_spoof = 200;
    double min_seconds = 1.0;
    double max_seconds = 3.0;
    int sample_rate = 16000;
    double lowpass_cutoff_hz = 2800.0;  // replay-channel corner frequency
    double channel_noise = 0.004;       // additive noise level after the channel
    std::size_t n_configurations = 3;   // distinct E/P/R triples among spoof files
    std::uint64_t seed = 1;
    std::string file_prefix = "T";      // e.g. T_1000001.wav

    void validate() const;
};

// Writes WAVs plus `protocol.txt` into out_dir; fully deterministic per
// seed (per-file streams are derived as hash(seed, file index)).
std::vector<ProtocolEntry> generate_synthetic_corpus(const SynthConfig& cfg,
                                                     const std::filesystem::path& out_dir);

}  // namespace spoofdet
