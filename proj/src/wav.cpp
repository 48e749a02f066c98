#include "spoofdet/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "spoofdet/io.hpp"

namespace spoofdet {

namespace {

std::string chunk_id(std::istream& is) {
    char id[4];
    is.read(id, 4);
    if (!is) throw std::runtime_error("unexpected end of WAV file");
    return std::string(id, 4);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open WAV file: " + path.string());

    if (chunk_id(is) != "RIFF") throw std::runtime_error("not a RIFF file: " + path.string());
    io::get_u32(is);  // RIFF size
    if (chunk_id(is) != "WAVE") throw std::runtime_error("not a WAVE file: " + path.string());

    int channels = 0;
    int sample_rate = 0;
    int bits = 0;
    bool have_fmt = false;
    Waveform w;

    while (is.peek() != EOF) {
        std::string id = chunk_id(is);
        std::uint32_t size = io::get_u32(is);
        if (id == "fmt ") {
            std::uint16_t format = io::get_u16(is);
            channels = io::get_u16(is);
            sample_rate = static_cast<int>(io::get_u32(is));
            io::get_u32(is);  // byte rate
            io::get_u16(is);  // block align
            bits = io::get_u16(is);
            if (size > 16) is.seekg(size - 16, std::ios::cur);
            if (format != 1) throw std::runtime_error("only PCM WAV supported: " + path.string());
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw std::runtime_error("WAV data before fmt chunk: " + path.string());
            if (channels != 1) throw std::runtime_error("only mono WAV supported: " + path.string());
            if (bits != 16) throw std::runtime_error("only 16-bit WAV supported: " + path.string());
            std::size_t n = size / 2;
            w.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                w.samples[i] = static_cast<double>(io::get_i16(is)) / 32768.0;
            w.sample_rate = sample_rate;
            return w;
        } else {
            // skip unknown chunk (word aligned)
            is.seekg(size + (size & 1), std::ios::cur);
        }
    }
    throw std::runtime_error("WAV file has no data chunk: " + path.string());
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
    if (w.samples.empty()) throw std::runtime_error("refusing to write empty waveform");
    if (w.sample_rate <= 0) throw std::runtime_error("invalid sample rate");

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write WAV file: " + path.string());

    const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
    io::put_magic(os, "RIFF");
    io::put_u32(os, 36 + data_bytes);
    io::put_magic(os, "WAVE");
    io::put_magic(os, "fmt ");
    io::put_u32(os, 16);
    io::put_u16(os, 1);  // PCM
    io::put_u16(os, 1);  // mono
    io::put_u32(os, static_cast<std::uint32_t>(w.sample_rate));
    io::put_u32(os, static_cast<std::uint32_t>(w.sample_rate * 2));
    io::put_u16(os, 2);
    io::put_u16(os, 16);
    io::put_magic(os, "data");
    io::put_u32(os, data_bytes);
    for (double s : w.samples) {
        double q = std::round(s * 32768.0);
        if (q > 32767.0) q = 32767.0;
        if (q < -32768.0) q = -32768.0;
        io::put_i16(os, static_cast<std::int16_t>(q));
    }
    if (!os) throw std::runtime_error("short write: " + path.string());
}

}  // namespace spoofdet
